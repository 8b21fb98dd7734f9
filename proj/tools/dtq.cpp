// dtq: counting, sampling, sensitivity, bounds and experiments on random
// bounded-depth decision trees.
//
// Exit status: 0 success / all checks passed, 1 a check failed, 2 usage or
// input error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtq/bounds.hpp"
#include "dtq/codec.hpp"
#include "dtq/counting.hpp"
#include "dtq/errors.hpp"
#include "dtq/experiments.hpp"
#include "dtq/random.hpp"
#include "dtq/report.hpp"
#include "dtq/sampler.hpp"
#include "dtq/sensitivity.hpp"

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dtq::UsageError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dtq::UsageError("cannot write '" + path + "'");
  out << text;
}

dtq::Model model_from(const std::string& name) {
  if (auto m = dtq::parse_model(name)) return *m;
  throw dtq::UsageError("unknown model '" + name + "'");
}

ojson bound_json(const dtq::BoundValue& b) {
  ojson j;
  j["raw"] = b.raw;
  j["clamped"] = b.clamped;
  j["log2"] = b.log2;
  j["in_range"] = b.in_range;
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

ojson dyadic_json(const dtq::Dyadic& v) {
  ojson j;
  j["exact"] = v.to_string();
  j["raw"] = v.to_double();
  j["clamped"] = std::min(v.to_double(), 1.0);
  j["log2"] = std::log2(v.to_double());
  return j;
}

void print_json(const ojson& j) { std::cout << j.dump(2) << '\n'; }

struct CountArgs {
  std::string cls;
  int d = 0;
  int vars = -1;
  int h = 0;
};

void run_count(const CountArgs& a) {
  static const std::map<std::string, dtq::CountClass> classes = {
      {"shapes", dtq::CountClass::Shapes},
      {"structures", dtq::CountClass::Structures},
      {"labeled", dtq::CountClass::Labeled},
      {"mindepth", dtq::CountClass::MinDepthShapes},
  };
  const auto it = classes.find(a.cls);
  if (it == classes.end()) throw dtq::UsageError("unknown class '" + a.cls + "'");
  const int vars = a.vars < 0 ? a.d : a.vars;
  dtq::BigCount value;
  switch (it->second) {
    case dtq::CountClass::Shapes: value = dtq::count_shapes(a.d); break;
    case dtq::CountClass::Structures: value = dtq::count_structures(a.d, vars); break;
    case dtq::CountClass::Labeled: value = dtq::count_labeled(a.d, vars); break;
    case dtq::CountClass::MinDepthShapes: value = dtq::count_min_depth_shapes(a.d, a.h); break;
  }
  std::cout << value.get_str() << '\n';
}

struct SampleArgs {
  std::string model;
  int d = 0;
  int vars = 0;
  std::uint64_t seed = 1;
  std::int64_t count = 1;
  std::string out;
};

void run_sample(const SampleArgs& a) {
  if (a.count < 0) throw dtq::UsageError("--count must be >= 0");
  const dtq::TreeSampler sampler(model_from(a.model), a.d, a.vars);
  const dtq::RandomStream root(a.seed);
  std::string text;
  for (std::int64_t i = 0; i < a.count; ++i) {
    dtq::RandomStream rng = root.substream(static_cast<std::uint64_t>(i));
    text += dtq::serialize(sampler(rng));
    text += '\n';
  }
  emit(a.out, text);
}

struct SensArgs {
  std::string in = "-";
  std::string method = "structural";
  int vars = -1;
};

void run_sens(const SensArgs& a) {
  if (a.method != "structural" && a.method != "brute") {
    throw dtq::UsageError("unknown method '" + a.method + "'");
  }
  const std::string text = read_input(a.in);
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    dtq::DecisionTree tree;
    try {
      tree = dtq::parse_tree(line);
    } catch (const dtq::ParseError& e) {
      throw dtq::ParseError(e.what(), "line " + std::to_string(line_no) + ", " + e.where());
    }
    dtq::Dyadic s;
    if (a.method == "structural") {
      s = dtq::avg_sensitivity_structural(tree);
    } else {
      const int n = a.vars >= 0 ? a.vars : static_cast<int>(dtq::max_var(tree) + 1);
      s = dtq::avg_sensitivity_bruteforce(dtq::truth_table(tree, n));
    }
    char decimal[40];
    std::snprintf(decimal, sizeof decimal, "%.17g", s.to_double());
    std::cout << s.to_string() << '\t' << decimal << '\n';
  }
}

struct BoundArgs {
  double sbar = 0.0;
  double eps = 1.0 / 3.0;
  int d = 0;
  double h = 0.0;
  double leaves = 1.0;
  double eta = 0.0;
  double delta = 0.0;
  int depth = 0;
  double c = 3.0;
};

struct ExpArgs {
  std::string name;
  std::string model = "full-uniform";
  int d = 6;
  int vars = 8;
  std::int64_t samples = 100;
  std::uint64_t seed = 1;
  double eps = 0.5;
  std::optional<int> h;
  std::string format = "csv";
  std::string out;
  int workers = 1;
  bool verify = false;
};

dtq::ReportFormat format_from(const std::string& name) {
  if (name == "csv") return dtq::ReportFormat::Csv;
  if (name == "json") return dtq::ReportFormat::Json;
  throw dtq::UsageError("unknown format '" + name + "'");
}

int report_verification(const dtq::Report& report) {
  const auto problems = dtq::verify_report(report);
  for (const auto& p : problems) std::cerr << "verify: " << p << '\n';
  if (!problems.empty()) return kExitCheckFailed;
  std::cerr << "verify: " << report.aggregates.size() << " aggregates match their records\n";
  return 0;
}

int run_exp(const ExpArgs& a) {
  const auto experiment = dtq::parse_experiment(a.name);
  if (!experiment) throw dtq::UsageError("unknown experiment '" + a.name + "'");
  dtq::ExperimentConfig config;
  config.experiment = *experiment;
  config.model = model_from(a.model);
  config.d = a.d;
  config.n = a.vars;
  config.samples = a.samples;
  config.seed = a.seed;
  config.epsilon = a.eps;
  config.h = a.h;
  config.workers = a.workers;
  const auto format = format_from(a.format);

  const dtq::Report report = dtq::run_experiment(config);
  const std::string text = dtq::to_text(report, format);
  emit(a.out, text);

  int status = 0;
  if (a.verify) status = report_verification(dtq::read_report(text, format));
  for (const auto& check : report.checks) {
    if (!check.passed) {
      std::cerr << "check failed: " << check.name << " (" << check.detail << ")\n";
      status = kExitCheckFailed;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counting, sampling and sensitivity of random decision trees"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  CountArgs count;
  auto* count_cmd = app.add_subcommand("count", "Exact tree counts, printed as decimal integers");
  count_cmd->add_option("--class", count.cls, "shapes | structures | labeled | mindepth")->required();
  count_cmd->add_option("--d", count.d, "Depth bound")->required();
  count_cmd->add_option("--vars", count.vars, "Variables (default: d)");
  count_cmd->add_option("--h", count.h, "Threshold for mindepth");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw random trees, one per line");
  sample_cmd->add_option("--model", sample.model, "shape-uniform | structure-two-stage | full-uniform | complete")
      ->required();
  sample_cmd->add_option("--d", sample.d, "Depth bound")->required();
  sample_cmd->add_option("--vars", sample.vars, "Variables")->required();
  sample_cmd->add_option("--seed", sample.seed, "Master seed");
  sample_cmd->add_option("--count", sample.count, "Number of trees");
  sample_cmd->add_option("--out", sample.out, "Output file (default stdout)");

  SensArgs sens;
  auto* sens_cmd = app.add_subcommand("sens", "Exact average sensitivity of each tree in a file");
  sens_cmd->add_option("--in", sens.in, "Tree file, one per line ('-' for stdin)");
  sens_cmd->add_option("--method", sens.method, "structural | brute");
  sens_cmd->add_option("--vars", sens.vars, "Variables for brute force (default: max var + 1)");

  BoundArgs b;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate a bound; prints JSON");
  bound_cmd->require_subcommand(1);
  auto* shi = bound_cmd->add_subcommand("shi", "Query lower bound (1/2)(1-2eps)^2 sbar");
  shi->add_option("--sbar", b.sbar)->required();
  shi->add_option("--eps", b.eps)->required();
  auto* lemma5 = bound_cmd->add_subcommand("lemma5", "Pr[some leaf at depth <= h] <= 2^(1-2^(d-h-2))");
  lemma5->add_option("--d", b.d)->required();
  lemma5->add_option("--h", b.h)->required();
  auto* theorem1 = bound_cmd->add_subcommand("theorem1", "Pr[sbar < (1-eps)d/3] tail");
  theorem1->add_option("--d", b.d)->required();
  theorem1->add_option("--eps", b.eps)->required();
  auto* mcdiarmid = bound_cmd->add_subcommand("mcdiarmid", "exp(-2 delta^2 / (L eta^2))");
  mcdiarmid->add_option("--L", b.leaves)->required();
  mcdiarmid->add_option("--eta", b.eta)->required();
  mcdiarmid->add_option("--delta", b.delta)->required();
  auto* lipschitz = bound_cmd->add_subcommand("lipschitz", "Per-leaf change bound depth * 2^(1-depth)");
  lipschitz->add_option("--depth", b.depth)->required();
  auto* alpha = bound_cmd->add_subcommand("alpha", "Constant (1-eps)/54");
  alpha->add_option("--eps", b.eps)->required();
  auto* loose = bound_cmd->add_subcommand("loose", "Tail with h = d - c log2 d");
  loose->add_option("--d", b.d)->required();
  loose->add_option("--c", b.c);

  ExpArgs exp;
  auto* exp_cmd = app.add_subcommand("exp", "Run an experiment and write its report");
  exp_cmd->add_option("name", exp.name, "lemma3 | lemma4 | lemma5 | theorem1 | model-compare")->required();
  exp_cmd->add_option("--model", exp.model, "Tree model");
  exp_cmd->add_option("--d", exp.d, "Depth bound");
  exp_cmd->add_option("--vars", exp.vars, "Variables");
  exp_cmd->add_option("--samples", exp.samples, "Sampled trees");
  exp_cmd->add_option("--seed", exp.seed, "Master seed");
  exp_cmd->add_option("--eps", exp.eps, "Slack epsilon");
  exp_cmd->add_option("--h", exp.h, "Leaf-depth threshold");
  exp_cmd->add_option("--format", exp.format, "csv | json");
  exp_cmd->add_option("--out", exp.out, "Output file (default stdout)");
  exp_cmd->add_option("--workers", exp.workers, "Worker threads; never changes the report");
  exp_cmd->add_flag("--verify", exp.verify, "Re-read the report and recompute its aggregates");

  std::string verify_in;
  std::string verify_format = "csv";
  auto* verify_cmd = app.add_subcommand("verify", "Recompute a saved report's aggregates from its records");
  verify_cmd->add_option("--in", verify_in, "Report file")->required();
  verify_cmd->add_option("--format", verify_format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*count_cmd) run_count(count);
    if (*sample_cmd) run_sample(sample);
    if (*sens_cmd) run_sens(sens);
    if (*bound_cmd) {
      if (*shi) {
        const double v = dtq::shi_lower_bound(b.sbar, b.eps);
        print_json({{"raw", v}, {"clamped", std::max(v, 0.0)}, {"log2", std::log2(v)}});
      }
      if (*lemma5) print_json(bound_json(dtq::leaf_depth_tail(b.d, b.h)));
      if (*theorem1) {
        const auto t = dtq::theorem1_tail(b.d, b.eps);
        ojson j = bound_json(t.total);
        j["threshold"] = t.threshold;
        j["leaf_term"] = bound_json(t.leaf_term);
        j["concentration_term"] = bound_json(t.concentration_term);
        print_json(j);
      }
      if (*mcdiarmid) print_json(bound_json(dtq::mcdiarmid_tail(b.leaves, b.eta, b.delta)));
      if (*lipschitz) print_json(dyadic_json(dtq::lipschitz_term(b.depth)));
      if (*alpha) {
        const double v = dtq::alpha_for(b.eps);
        print_json({{"raw", v}, {"clamped", v}, {"log2", std::log2(v)}});
      }
      if (*loose) {
        const auto t = dtq::loose_tail(b.d, b.c);
        ojson j = bound_json(t.total);
        j["h"] = t.h;
        j["delta"] = t.delta;
        j["eta"] = t.eta;
        j["threshold"] = t.threshold;
        j["flagged"] = t.flagged;
        j["leaf_term"] = bound_json(t.leaf_term);
        j["concentration_term"] = bound_json(t.concentration_term);
        print_json(j);
      }
    }
    if (*exp_cmd) return run_exp(exp);
    if (*verify_cmd) {
      return report_verification(dtq::read_report(read_input(verify_in), format_from(verify_format)));
    }
  } catch (const dtq::ParseError& e) {
    std::cerr << "dtq: parse error at " << e.where() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dtq: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    std::cerr << "dtq: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
