// Command-line front end: check a model file, evaluate single objects,
// and list or write the built-in examples.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tegeo/tegeo.hpp"

namespace {

enum ExitCode { kPass = 0, kFail = 1, kInputError = 2, kInconsistent = 3 };

struct GlobalOptions {
  std::optional<double> tol;
  std::optional<int> points;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "text";
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw InputError(g.out + ": cannot write file");
  out << text;
}

std::pair<tegeo::ModelConfig, tegeo::Model> load(const std::string& path, const std::string& text) {
  try {
    tegeo::ModelConfig c = tegeo::parse_config(text);
    tegeo::Model m = tegeo::build_model(c);
    return {std::move(c), std::move(m)};
  } catch (const tegeo::ConfigError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text, int n, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    const std::string t = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw InputError(std::string(flag) + ": invalid number '" + item + "'");
    }
    out.push_back(v);
  }
  if (static_cast<int>(out.size()) != n) {
    throw InputError(std::string(flag) + ": expected " + std::to_string(n) + " comma-separated values");
  }
  return out;
}

int run_check(const GlobalOptions& g, const std::string& path) {
  const std::string text = read_file(path);
  auto [config, model] = load(path, text);
  tegeo::SampleSpec spec = config.sampling;
  tegeo::Tolerances tol = config.tolerances;
  if (g.tol) tol.residual = *g.tol;
  if (g.points) spec.points = *g.points;
  if (g.seed) spec.seed = *g.seed;
  const tegeo::Report report = tegeo::verify(model, spec, tol);
  const std::string hash = tegeo::git_blob_sha1(text);
  write_output(g, g.format == "machine" ? tegeo::report_machine(report, hash) : tegeo::report_text(report, hash));
  return report.exit_code();
}

int run_eval(const GlobalOptions& g, const std::string& path, const std::string& object, const std::string& x,
             const std::string& v) {
  const std::string text = read_file(path);
  auto [config, model] = load(path, text);
  const int n = config.dim;
  tegeo::TangentPoint p{parse_list(x, n, "--x"),
                        v.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0) : parse_list(v, n, "--v")};
  tegeo::EvaluatedObject o;
  try {
    o = tegeo::evaluate_object(model, object, p);
  } catch (const tegeo::UnknownObjectError& e) {
    throw InputError(e.what());
  } catch (const tegeo::FieldError& e) {
    throw InputError(e.what());
  } catch (const tegeo::DomainError& e) {
    throw InputError(e.what());
  }
  write_output(g, g.format == "machine" ? tegeo::object_json(o).dump(2) + "\n" : tegeo::format_object_text(o));
  return kPass;
}

int run_examples(const GlobalOptions& g, const std::string& action, const std::string& name) {
  if (action == "list") {
    std::string s;
    for (const auto& n : tegeo::gallery_names()) s += n + "  " + tegeo::gallery_summary(n) + "\n";
    write_output(g, s);
    return kPass;
  }
  if (action != "emit") throw InputError("examples: action must be 'list' or 'emit'");
  if (name.empty()) throw InputError("examples emit: missing example name");
  try {
    write_output(g, tegeo::gallery_text(name));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic and Poisson structures induced on TE by a metric and a spacetime connection"};
  app.require_subcommand(1);
  GlobalOptions g;
  double tol = 0.0;
  int points = 0;
  std::uint64_t seed = 0;
  auto* tol_opt = app.add_option("--tol", tol, "Residual tolerance (default from the model file)");
  auto* points_opt = app.add_option("--points", points, "Number of sample points")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Sampling seed");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "machine"}));

  std::string config_path, object, x, v, action, name;
  auto* check = app.add_subcommand("check", "Verify the structures induced by a model file");
  check->add_option("config", config_path, "Model file")->required();
  check->fallthrough();

  auto* eval = app.add_subcommand("eval", "Evaluate one object at a point");
  eval->add_option("config", config_path, "Model file")->required();
  eval->add_option("object", object, "One of: upsilon, lambda, d-upsilon, schouten, torsion, curvature, nabla-g, "
                                      "d-K-g, lie-K-gflat, contraction")
      ->required();
  eval->add_option("--x", x, "Base coordinates, comma separated")->required();
  eval->add_option("--v", v, "Velocity coordinates, comma separated (default 0)");
  eval->fallthrough();

  auto* examples = app.add_subcommand("examples", "List or write the built-in example models");
  examples->add_option("action", action, "list or emit")->required()->check(CLI::IsMember({"list", "emit"}));
  examples->add_option("name", name, "Example name for emit");
  examples->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }
  if (*tol_opt) g.tol = tol;
  if (*points_opt) g.points = points;
  if (*seed_opt) g.seed = seed;

  try {
    if (*check) return run_check(g, config_path);
    if (*eval) return run_eval(g, config_path, object, x, v);
    return run_examples(g, action, name);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const tegeo::VerificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const tegeo::FieldError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
