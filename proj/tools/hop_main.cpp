// Command-line front end: curve generation, scenario simulation, dependence
// tests, power studies, and RGB-cube extraction from PPM images.
//
// Exit codes: 0 = ok, 1 = completed with warnings (some requested delays
// could not be computed), 2 = error. Errors print one machine-parsable line
// "E_CODE: message" to stderr.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hop/dgp.hpp"
#include "hop/gilbert.hpp"
#include "hop/io.hpp"
#include "hop/power.hpp"
#include "hop/spatial.hpp"

namespace {

using namespace hop;

std::vector<int> parse_csv_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw Error(errc::parameter_error, what + ": bad integer '" + tok + "'");
    }
  }
  if (out.empty()) throw Error(errc::parameter_error, what + ": empty list");
  return out;
}

std::vector<double> parse_csv_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(errc::parameter_error, what + ": bad number '" + tok + "'");
    }
  }
  return out;
}

GridDims dims_from_list(const std::vector<int>& e) {
  if (e.size() == 2) return GridDims::d2(e[0], e[1]);
  if (e.size() == 3) return GridDims::d3(e[0], e[1], e[2]);
  throw Error(errc::invalid_dimension, "--dims needs 2 or 3 extents");
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot write " + out_path);
  out << text;
}

int cmd_curve(const std::string& dims_text, const std::string& format,
              const std::string& out_path) {
  const CurvePath path = gilbert_curve(dims_from_list(parse_csv_ints(dims_text, "--dims")));
  std::ostringstream os;
  if (format == "json") {
    nlohmann::json j;
    j["type"] = "curve";
    j["dims"] = nlohmann::json::array();
    for (int i = 0; i < path.dims.k; ++i) j["dims"].push_back(path.dims.ext[i]);
    j["coords"] = nlohmann::json::array();
    for (const auto& c : path.coords) {
      nlohmann::json cell = nlohmann::json::array();
      for (int i = 0; i < path.dims.k; ++i) cell.push_back(c[i]);
      j["coords"].push_back(cell);
    }
    os << j.dump(2) << "\n";
  } else if (format == "csv") {
    for (const auto& c : path.coords) {
      for (int i = 0; i < path.dims.k; ++i) os << (i ? "," : "") << c[i];
      os << "\n";
    }
  } else {
    throw Error(errc::parameter_error, "curve: format must be csv or json");
  }
  write_output(os.str(), out_path);
  return 0;
}

int cmd_simulate(const std::string& family, const std::string& dims_text,
                 const std::string& params_text, const std::string& exponents_text,
                 double lambda, int burn, int margin, double ao_fraction,
                 double ao_magnitude, std::uint64_t seed, const std::string& out_path) {
  DgpSpec spec;
  spec.family = dgp_family_from_name(family);
  spec.dims = dims_from_list(parse_csv_ints(dims_text, "--dims"));
  if (!params_text.empty()) spec.coeffs = parse_csv_doubles(params_text, "--params");
  if (!exponents_text.empty())
    for (double e : parse_csv_doubles(exponents_text, "--exponents"))
      spec.exponents.push_back(static_cast<int>(e));
  spec.lambda = lambda;
  spec.burn = burn;
  spec.margin = margin;
  if (ao_fraction > 0.0) spec.contamination = Contamination{ao_fraction, ao_magnitude};

  DgpSampler sampler(spec);
  Rng rng = make_stream(seed, 0);
  GridData grid = sampler.draw(rng);
  if (out_path.empty()) throw Error(errc::parameter_error, "simulate: --out required");
  save_grid(grid, out_path);
  return 0;
}

int cmd_test(const std::string& input, const std::string& delays_text,
             const std::string& tests_text, std::uint64_t seed, int sop_reps,
             const std::string& format_name, const std::string& out_path) {
  const GridData grid = load_grid(input);
  const ReportFormat format = report_format_from_name(format_name);
  const std::vector<int> delays = parse_csv_ints(delays_text, "--delays");

  bool want_hop = false, want_sop = false, want_sacf = false;
  {
    std::stringstream ss(tests_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "hop")
        want_hop = true;
      else if (tok == "sop")
        want_sop = true;
      else if (tok == "sacf")
        want_sacf = true;
      else
        throw Error(errc::parameter_error, "--tests: unknown test '" + tok + "'");
    }
  }
  if (!want_hop && !want_sop && !want_sacf)
    throw Error(errc::parameter_error, "--tests: nothing selected");

  std::optional<HopReport> hop_report;
  std::optional<SopResult> sop_result;
  std::optional<SacfResult> sacf_result;
  if (want_hop) hop_report = hop_test(grid, delays, seed);
  if (want_sop) sop_result = sop_tau_tilde(grid, sop_reps, seed);
  if (want_sacf) sacf_result = sacf_test(grid);

  std::ostringstream os;
  if (format == ReportFormat::json) {
    nlohmann::json j;
    j["type"] = "test_report";
    if (hop_report) j["hop"] = to_json(*hop_report);
    if (sop_result) j["sop"] = to_json(*sop_result);
    if (sacf_result) j["sacf"] = to_json(*sacf_result);
    os << j.dump(2) << "\n";
  } else {
    if (hop_report) os << emit_report(*hop_report, format);
    if (sop_result) os << emit_report(*sop_result, format);
    if (sacf_result) os << emit_report(*sacf_result, format);
  }
  write_output(os.str(), out_path);
  return (hop_report && !hop_report->all_ok()) ? 1 : 0;
}

int cmd_power(const std::string& study_path, int reps_override,
              std::int64_t seed_override, int workers, const std::string& format_name,
              const std::string& out_path) {
  StudySpec spec = load_study(study_path);
  if (reps_override > 0) spec.reps = reps_override;
  if (seed_override >= 0) spec.master_seed = static_cast<std::uint64_t>(seed_override);
  const PowerTable table = run_study(spec, workers);
  write_output(emit_report(table, report_format_from_name(format_name)), out_path);
  return table.errors.empty() ? 0 : 1;
}

int cmd_rgbcube(const std::string& input, int bits, const std::string& out_path) {
  const GridData cube = ppm_to_rgb_cube(input, bits);
  if (out_path.empty()) throw Error(errc::parameter_error, "rgbcube: --out required");
  save_grid(cube, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial dependence tests for grid data via Hilbert-curve ordinal patterns"};
  app.require_subcommand(1);

  // curve
  auto* curve = app.add_subcommand("curve", "emit a space-filling curve for a grid");
  std::string curve_dims, curve_format = "csv", curve_out;
  curve->add_option("--dims", curve_dims, "extents W,H[,D]")->required();
  curve->add_option("--format", curve_format, "csv|json");
  curve->add_option("--out", curve_out, "output file (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw one sample from a scenario");
  std::string sim_family, sim_dims, sim_params, sim_exponents, sim_out;
  double sim_lambda = 0.05, sim_ao_fraction = 0.0, sim_ao_magnitude = 10.0;
  int sim_burn = 50, sim_margin = 10;
  std::uint64_t sim_seed = 1;
  sim->add_option("--dgp", sim_family,
                  "sar11|sar1_sim|sqma11|sqma1_sim|sqma111|sqma1_3d|grf3d")
      ->required();
  sim->add_option("--dims", sim_dims, "extents E1,E2[,E3]")->required();
  sim->add_option("--params", sim_params, "family coefficients a,b,c,...");
  sim->add_option("--exponents", sim_exponents, "qma exponents q1,q2,...");
  sim->add_option("--lambda", sim_lambda, "grf3d length scale");
  sim->add_option("--burn", sim_burn, "sar11 burn-in margin");
  sim->add_option("--margin", sim_margin, "sar1_sim boundary margin");
  sim->add_option("--ao-fraction", sim_ao_fraction, "additive-outlier fraction");
  sim->add_option("--ao-magnitude", sim_ao_magnitude, "additive-outlier magnitude");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--out", sim_out, "output grid file")->required();

  // test
  auto* test = app.add_subcommand("test", "run dependence tests on a grid file");
  std::string test_input, test_delays = "1,2,3,4", test_tests = "hop", test_format = "table",
              test_out;
  std::uint64_t test_seed = 1;
  int test_sop_reps = 2000;
  test->add_option("--input", test_input, "grid file")->required();
  test->add_option("--delays", test_delays, "delays for the HOP tests");
  test->add_option("--tests", test_tests, "comma list of hop,sop,sacf");
  test->add_option("--seed", test_seed, "seed for dithering and the sop null");
  test->add_option("--sop-reps", test_sop_reps, "sop Monte Carlo null size");
  test->add_option("--format", test_format, "table|json|csv");
  test->add_option("--out", test_out, "output file (default stdout)");

  // power
  auto* power = app.add_subcommand("power", "run a Monte Carlo power study");
  std::string power_study, power_format = "csv", power_out;
  int power_reps = 0, power_workers = 0;
  std::int64_t power_seed = -1;
  power->add_option("--study", power_study, "study file (toml)")->required();
  power->add_option("--reps", power_reps, "override replication count");
  power->add_option("--seed", power_seed, "override master seed");
  power->add_option("--workers", power_workers, "worker threads (default HOP_THREADS)");
  power->add_option("--format", power_format, "csv|table|json");
  power->add_option("--out", power_out, "output file (default stdout)");

  // rgbcube
  auto* rgb = app.add_subcommand("rgbcube", "build an RGB frequency cube from a PPM image");
  std::string rgb_input, rgb_out;
  int rgb_bits = 3;
  rgb->add_option("--input", rgb_input, "PPM image (P3 or P6, maxval 255)")->required();
  rgb->add_option("--bits", rgb_bits, "color depth in bits (1..8)");
  rgb->add_option("--out", rgb_out, "output grid file")->required();

  try {
    app.parse(argc, argv);
    if (*curve) return cmd_curve(curve_dims, curve_format, curve_out);
    if (*sim)
      return cmd_simulate(sim_family, sim_dims, sim_params, sim_exponents, sim_lambda,
                          sim_burn, sim_margin, sim_ao_fraction, sim_ao_magnitude,
                          sim_seed, sim_out);
    if (*test)
      return cmd_test(test_input, test_delays, test_tests, test_seed, test_sop_reps,
                      test_format, test_out);
    if (*power)
      return cmd_power(power_study, power_reps, power_seed, power_workers, power_format,
                       power_out);
    if (*rgb) return cmd_rgbcube(rgb_input, rgb_bits, rgb_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << "E_ARGS: " << e.what() << "\n";
    return 2;
  } catch (const hop::Error& e) {
    std::cerr << e.code_name() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL: " << e.what() << "\n";
    return 2;
  }
}
