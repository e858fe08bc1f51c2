#include "qord/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qord::cfg {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open config file");
  }
  std::ostringstream oss;
  oss << in.rdbuf();
  const std::string text = oss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based; count newlines up to the failure point.
    std::size_t line = 1;
    const std::size_t limit = std::min(text.size(), e.byte > 0 ? e.byte - 1 : std::size_t{0});
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

class Reader {
 public:
  Reader(const json& j, std::string context) : j_(j), context_(std::move(context)) {}

  template <typename T>
  T require(const char* field) const {
    if (!j_.contains(field)) {
      throw ConfigError(context_ + ": missing required field '" + field + "'");
    }
    return get<T>(field);
  }

  template <typename T>
  T get_or(const char* field, T fallback) const {
    if (!j_.contains(field)) return fallback;
    return get<T>(field);
  }

  bool has(const char* field) const { return j_.contains(field); }

  const json& raw(const char* field) const { return j_.at(field); }

  std::string context(const char* field) const { return context_ + "." + field; }

 private:
  template <typename T>
  T get(const char* field) const {
    try {
      return j_.at(field).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(context_ + ": field '" + field + "' has the wrong type");
    }
  }

  const json& j_;
  std::string context_;
};

DispersionModel parse_dispersion(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array()) {
    throw ConfigError(context + ": expected an object with a 'terms' array");
  }
  DispersionModel model;
  for (const auto& term : j.at("terms")) {
    Reader r(term, context + ".terms[]");
    model.terms.push_back(
        {r.require<double>("a_deg_nm2_ml_per_g_dm"), r.require<double>("lambda0_nm")});
  }
  try {
    model.validate();
  } catch (const std::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
  return model;
}

Scheme parse_scheme(const std::string& name, const std::string& context) {
  try {
    return scheme_from_name(name);
  } catch (const std::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

void rethrow_as_config(const std::filesystem::path& path, const std::exception& e) {
  throw ConfigError(path.string() + ": " + e.what());
}

}  // namespace

FisherConfig load_fisher_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  Reader r(j, path.filename().string());
  FisherConfig config;
  config.visibility = r.require<double>("visibility");
  config.bias_phase_rad = r.get_or<double>("bias_phase_rad", config.bias_phase_rad);
  config.delta_alpha_min_rad =
      r.get_or<double>("delta_alpha_min_rad", config.delta_alpha_min_rad);
  config.delta_alpha_max_rad =
      r.get_or<double>("delta_alpha_max_rad", config.delta_alpha_max_rad);
  config.n_points = r.get_or<int>("n_points", config.n_points);
  if (!(config.visibility > 0.0) || config.visibility > 1.0) {
    throw ConfigError(path.string() + ": 'visibility' must lie in (0, 1]");
  }
  if (!(config.delta_alpha_min_rad < config.delta_alpha_max_rad)) {
    throw ConfigError(path.string() + ": empty delta-alpha span");
  }
  if (config.n_points < 2) {
    throw ConfigError(path.string() + ": 'n_points' must be at least 2");
  }
  return config;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  Reader r(j, path.filename().string());
  GridConfig config;
  config.schemes.clear();
  for (const auto& name : r.require<std::vector<std::string>>("schemes")) {
    config.schemes.push_back(parse_scheme(name, r.context("schemes")));
  }
  config.concentrations_g_per_ml =
      r.require<std::vector<double>>("concentrations_g_per_ml");
  config.delta_lambdas_nm = r.require<std::vector<double>>("delta_lambda_nm");
  config.pump_nm = r.get_or<double>("pump_nm", config.pump_nm);
  config.bias_phase_rad = r.get_or<double>("bias_phase_rad", config.bias_phase_rad);
  config.visibility = r.require<double>("visibility");
  config.pair_rate_per_s = r.get_or<double>("pair_rate_per_s", config.pair_rate_per_s);
  config.bin_duration_s = r.get_or<double>("bin_duration_s", config.bin_duration_s);
  config.n_bins = r.get_or<int>("n_bins", config.n_bins);
  config.master_seed = r.require<std::uint64_t>("seed");
  config.path_length_dm = r.get_or<double>("path_length_dm", config.path_length_dm);
  if (r.has("dispersion_model")) {
    config.dispersion = parse_dispersion(r.raw("dispersion_model"),
                                         r.context("dispersion_model"));
  }
  if (r.has("pair_rate_overrides")) {
    for (const auto& o : r.raw("pair_rate_overrides")) {
      Reader ro(o, r.context("pair_rate_overrides[]"));
      RateOverride ov;
      ov.scheme = parse_scheme(ro.require<std::string>("scheme"), r.context("scheme"));
      ov.concentration_g_per_ml = ro.require<double>("concentration_g_per_ml");
      ov.delta_lambda_nm = ro.require<double>("delta_lambda_nm");
      const std::string run = ro.require<std::string>("run");
      if (run != "blank" && run != "sample") {
        throw ConfigError(r.context("pair_rate_overrides[].run") +
                          ": must be 'blank' or 'sample'");
      }
      ov.blank = run == "blank";
      ov.pair_rate_per_s = ro.require<double>("pair_rate_per_s");
      config.rate_overrides.push_back(ov);
    }
  }
  try {
    config.validate();
  } catch (const std::exception& e) {
    rethrow_as_config(path, e);
  }
  return config;
}

RunPlan load_run_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  Reader r(j, path.filename().string());
  RunPlan plan;
  plan.scheme = parse_scheme(r.require<std::string>("scheme"), r.context("scheme"));
  if (!r.has("sample")) {
    throw ConfigError(path.string() + ": missing required field 'sample'");
  }
  Reader sample(r.raw("sample"), r.context("sample"));
  plan.sample.is_blank = sample.get_or<bool>("blank", false);
  plan.sample.concentration_g_per_ml = sample.get_or<double>("concentration_g_per_ml", 0.0);
  plan.sample.path_length_dm = sample.get_or<double>("path_length_dm", 0.2);
  if (!plan.sample.is_blank && plan.sample.concentration_g_per_ml > 0.0) {
    if (!r.has("dispersion_model")) {
      throw ConfigError(path.string() +
                        ": a non-blank sample needs a 'dispersion_model' block");
    }
    plan.sample.model =
        parse_dispersion(r.raw("dispersion_model"), r.context("dispersion_model"));
  }
  plan.delta_lambda_nm = r.get_or<double>("delta_lambda_nm", plan.delta_lambda_nm);
  plan.pump_nm = r.get_or<double>("pump_nm", plan.pump_nm);
  plan.bias_phase_rad = r.get_or<double>("bias_phase_rad", plan.bias_phase_rad);
  plan.visibility = r.require<double>("visibility");
  plan.pair_rate_per_s = r.get_or<double>("pair_rate_per_s", plan.pair_rate_per_s);
  plan.bin_duration_s = r.get_or<double>("bin_duration_s", plan.bin_duration_s);
  plan.n_bins = r.get_or<int>("n_bins", plan.n_bins);
  plan.rng_seed = r.require<std::uint64_t>("seed");
  plan.label = r.get_or<std::string>("label", "");
  try {
    plan.validate();
  } catch (const std::exception& e) {
    rethrow_as_config(path, e);
  }
  return plan;
}

CalibrationPlan load_calibration_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  Reader r(j, path.filename().string());
  CalibrationPlan plan;
  plan.scheme = parse_scheme(r.get_or<std::string>("scheme", "psi"), r.context("scheme"));
  plan.visibility = r.require<double>("visibility");
  plan.pair_rate_per_s = r.get_or<double>("pair_rate_per_s", plan.pair_rate_per_s);
  plan.bins_per_setting = r.get_or<int>("bins_per_setting", plan.bins_per_setting);
  plan.bin_duration_s = r.get_or<double>("bin_duration_s", plan.bin_duration_s);
  plan.delta_lambda_nm = r.get_or<double>("delta_lambda_nm", plan.delta_lambda_nm);
  plan.pump_nm = r.get_or<double>("pump_nm", plan.pump_nm);
  plan.rng_seed = r.require<std::uint64_t>("seed");
  if (r.has("hwp_angles_rad")) {
    // Bias phase from waveplate angles through the linear mapping
    // alpha0 = k * angle + c.
    if (!r.has("hwp_mapping")) {
      throw ConfigError(path.string() + ": 'hwp_angles_rad' needs an 'hwp_mapping' block");
    }
    Reader mapping(r.raw("hwp_mapping"), r.context("hwp_mapping"));
    const double k = mapping.require<double>("k");
    const double c = mapping.require<double>("c");
    for (double angle : r.require<std::vector<double>>("hwp_angles_rad")) {
      plan.explicit_settings_rad.push_back(k * angle + c);
    }
  } else {
    plan.n_settings = r.get_or<int>("n_settings", plan.n_settings);
    plan.span_rad = r.get_or<double>("span_rad", plan.span_rad);
  }
  try {
    plan.validate();
  } catch (const std::exception& e) {
    rethrow_as_config(path, e);
  }
  return plan;
}

}  // namespace qord::cfg
