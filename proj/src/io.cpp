#include "qord/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qord::io {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open " + path.string());
  }
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

json metadata_to_json(const SetMetadata& meta) {
  return json{{"scheme", scheme_name(meta.scheme)},
              {"bias_phase_rad", meta.bias_phase_rad},
              {"visibility", meta.visibility},
              {"lambda1_nm", meta.lambda1_nm},
              {"lambda2_nm", meta.lambda2_nm},
              {"sample_label", meta.sample_label},
              {"bin_duration_s", meta.bin_duration_s}};
}

SetMetadata metadata_from_json(const json& j, const std::string& context) {
  SetMetadata meta;
  try {
    meta.scheme = scheme_from_name(j.at("scheme").get<std::string>());
    meta.bias_phase_rad = j.at("bias_phase_rad").get<double>();
    meta.visibility = j.at("visibility").get<double>();
    meta.lambda1_nm = j.at("lambda1_nm").get<double>();
    meta.lambda2_nm = j.at("lambda2_nm").get<double>();
    meta.sample_label = j.at("sample_label").get<std::string>();
    meta.bin_duration_s = j.at("bin_duration_s").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(context + ": " + e.what());
  }
  return meta;
}

std::vector<BinCounts> parse_counts_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCountsCsvHeader) {
    throw std::invalid_argument(name + ": missing or malformed counts header");
  }
  std::vector<BinCounts> bins;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::uint64_t, 5> fields{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f < 5; ++f) {
      auto [next, ec] = std::from_chars(p, end, fields[f]);
      if (ec != std::errc{}) {
        throw std::invalid_argument(name + ":" + std::to_string(line_no) +
                                    ": malformed counts row");
      }
      p = next;
      if (f < 4) {
        if (p == end || *p != ',') {
          throw std::invalid_argument(name + ":" + std::to_string(line_no) +
                                      ": expected 5 comma-separated fields");
        }
        ++p;
      }
    }
    bins.push_back({fields[1], fields[2], fields[3], fields[4]});
  }
  if (bins.empty()) {
    throw std::invalid_argument(name + ": counts file has no bins");
  }
  return bins;
}

json estimate_to_json(const Estimate& e) {
  return json{{"parameter", parameter_name(e.parameter)},
              {"scheme", scheme_name(e.scheme)},
              {"value_deg", e.value_deg},
              {"std_error_deg", e.std_error_deg},
              {"pooled_sigma_deg", e.pooled_sigma_deg},
              {"n_pairs", e.n_pairs},
              {"fi_used_per_rad2", e.fi_used_per_rad2},
              {"crb_sigma_deg", e.crb_sigma_deg},
              {"ratio_to_classical_crb", e.ratio_to_classical_crb},
              {"theta_ref_rad", e.theta_ref_rad},
              {"theta_sample_rad", e.theta_sample_rad},
              {"sample_label", e.sample_label},
              {"reference_label", e.reference_label}};
}

std::string cell_file_stem(const GridCell& cell, bool blank) {
  std::ostringstream oss;
  oss.setf(std::ios::fixed);
  oss.precision(3);
  oss << scheme_name(cell.scheme) << "_c" << cell.concentration_g_per_ml;
  oss.precision(2);
  oss << "_dl" << cell.delta_lambda_nm << (blank ? "_blank" : "_sample");
  return oss.str();
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    throw std::runtime_error("double formatting failed");
  }
  return std::string(buf.data(), end);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension();
  p += ".meta.json";
  return p;
}

void write_coincidence_csv(const std::filesystem::path& csv_path, const CoincidenceSet& set) {
  set.validate();
  std::ostringstream oss;
  oss << kCountsCsvHeader << '\n';
  for (std::size_t i = 0; i < set.bins.size(); ++i) {
    const auto& b = set.bins[i];
    oss << i << ',' << b.hh << ',' << b.hv << ',' << b.vh << ',' << b.vv << '\n';
  }
  write_text(csv_path, oss.str());
  write_text(sidecar_path(csv_path), metadata_to_json(set.meta).dump(2) + "\n");
}

CoincidenceSet read_coincidence_csv(const std::filesystem::path& csv_path) {
  CoincidenceSet set;
  set.bins = parse_counts_csv(read_text(csv_path), csv_path.filename().string());
  const std::filesystem::path meta_path = sidecar_path(csv_path);
  if (!std::filesystem::exists(meta_path)) {
    throw std::invalid_argument(meta_path.string() + ": metadata sidecar is missing");
  }
  json j;
  try {
    j = json::parse(read_text(meta_path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(meta_path.string() + ": " + e.what());
  }
  set.meta = metadata_from_json(j, meta_path.filename().string());
  return set;
}

CoincidenceSet read_counts_only_csv(const std::filesystem::path& csv_path) {
  CoincidenceSet set;
  set.bins = parse_counts_csv(read_text(csv_path), csv_path.filename().string());
  return set;
}

void write_estimates_jsonl(const std::filesystem::path& path,
                           const std::vector<Estimate>& estimates) {
  std::ostringstream oss;
  for (const auto& e : estimates) {
    oss << estimate_to_json(e).dump() << '\n';
  }
  write_text(path, oss.str());
}

void write_fi_curve_csv(const std::filesystem::path& path, const std::vector<FiCurveRow>& rows) {
  std::ostringstream oss;
  oss << kFiCurveCsvHeader << '\n';
  for (const auto& row : rows) {
    oss << format_double(row.delta_alpha_rad) << ',' << format_double(row.fi_exp) << ','
        << format_double(row.fi_quantum_ideal) << ',' << format_double(row.fi_classical_ideal)
        << '\n';
  }
  write_text(path, oss.str());
}

void write_fi_summary_json(const std::filesystem::path& path, const FiCurveSummary& summary,
                           double visibility, double bias_phase_rad) {
  json j{{"visibility", visibility},
         {"bias_phase_rad", bias_phase_rad},
         {"max_fi_exp_per_rad2", summary.max_fi_exp},
         {"delta_alpha_at_max_rad", summary.delta_alpha_at_max_rad},
         {"enhancement_ratio", summary.enhancement_ratio},
         {"break_even_visibility", summary.break_even_visibility},
         {"classical_crossings_rad", summary.classical_crossings_rad}};
  write_text(path, j.dump(2) + "\n");
}

void write_calibration_json(const std::filesystem::path& path, const CalibrationCurve& curve) {
  static constexpr const char* kChannelNames[4] = {"hh", "hv", "vh", "vv"};
  json channels = json::array();
  for (int c = 0; c < 4; ++c) {
    const ChannelFit& fit = curve.channels[c];
    channels.push_back(json{{"channel", kChannelNames[c]},
                            {"amplitude_per_s", fit.amplitude_per_s},
                            {"visibility", fit.visibility},
                            {"phase_rad", fit.phase_rad},
                            {"se_amplitude", fit.se_amplitude},
                            {"se_visibility", fit.se_visibility},
                            {"se_phase_rad", fit.se_phase},
                            {"chi2", fit.chi2},
                            {"n_points", fit.n_points}});
  }
  json j{{"channels", channels},
         {"pooled_visibility", curve.pooled_visibility},
         {"se_pooled_visibility", curve.se_pooled_visibility},
         {"chi2", curve.chi2},
         {"dof", curve.dof},
         {"phase_opposition_sigmas", curve.phase_opposition_sigmas}};
  write_text(path, j.dump(2) + "\n");
}

double read_calibration_visibility(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
    return j.at("pooled_visibility").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_grid_outputs(const std::filesystem::path& out_dir, const GridResult& result) {
  std::filesystem::create_directories(out_dir / "cells");

  json manifest;
  manifest["master_seed"] = result.config.master_seed;
  manifest["n_cells"] = result.cells.size();
  json cells = json::array();

  std::vector<Estimate> estimates;
  std::ostringstream table;
  table << kGridTableCsvHeader << '\n';

  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const GridCell& cell = result.cells[i];
    json entry{{"index", i},
               {"scheme", scheme_name(cell.scheme)},
               {"concentration_g_per_ml", cell.concentration_g_per_ml},
               {"delta_lambda_nm", cell.delta_lambda_nm},
               {"seed_blank", cell.seed_blank},
               {"seed_sample", cell.seed_sample},
               {"status", cell.status == CellStatus::Ok ? "ok" : "failed"},
               {"error", cell.error}};
    if (cell.status == CellStatus::Ok) {
      const std::string blank_rel = "cells/" + cell_file_stem(cell, true) + ".csv";
      const std::string sample_rel = "cells/" + cell_file_stem(cell, false) + ".csv";
      write_coincidence_csv(out_dir / blank_rel, cell.blank_set);
      write_coincidence_csv(out_dir / sample_rel, cell.sample_set);
      entry["blank_csv"] = blank_rel;
      entry["sample_csv"] = sample_rel;
      estimates.push_back(*cell.estimate);
      table << scheme_name(cell.scheme) << ',' << format_double(cell.concentration_g_per_ml)
            << ',' << format_double(cell.delta_lambda_nm) << ','
            << parameter_name(cell.estimate->parameter) << ','
            << format_double(cell.estimate->value_deg) << ','
            << format_double(cell.estimate->std_error_deg) << ','
            << format_double(cell.prediction_deg) << ','
            << format_double(cell.estimate->ratio_to_classical_crb) << '\n';
    }
    cells.push_back(std::move(entry));
  }
  manifest["cells"] = std::move(cells);

  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(out_dir / "grid_table.csv", table.str());
  write_estimates_jsonl(out_dir / "estimates.jsonl", estimates);
}

}  // namespace qord::io
