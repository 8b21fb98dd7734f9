#include "dtq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "dtq/bounds.hpp"
#include "dtq/codec.hpp"
#include "dtq/counting.hpp"
#include "dtq/errors.hpp"
#include "dtq/sensitivity.hpp"

namespace dtq {

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Lemma3: return "lemma3";
    case Experiment::Lemma4: return "lemma4";
    case Experiment::Lemma5: return "lemma5";
    case Experiment::Theorem1: return "theorem1";
    case Experiment::ModelCompare: return "model-compare";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (auto e : {Experiment::Lemma3, Experiment::Lemma4, Experiment::Lemma5, Experiment::Theorem1,
                 Experiment::ModelCompare}) {
    if (name == to_string(e)) return e;
  }
  if (name == "model_compare") return Experiment::ModelCompare;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw UsageError("experiment config: " + msg); };
  if (d < 0) fail("d must be >= 0");
  if (n < d) fail("need n >= d");
  if (samples < 1) fail("samples must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0, 1)");
  if (d > kMaxCountDepth && model != Model::Complete) fail("d exceeds the count cap");
  if (experiment == Experiment::ModelCompare && d > 4) fail("model-compare needs d <= 4");
  if (exhaustive_leaf_cap < 0 || exhaustive_leaf_cap > 24) fail("exhaustive_leaf_cap must lie in [0, 24]");
  if (exact_depth_cap < 0 || exact_depth_cap > kMaxCountDepth) fail("exact_depth_cap out of range");
  if (assignments_per_structure < 2) fail("assignments_per_structure must be >= 2");
  if (flips_per_tree < 1) fail("flips_per_tree must be >= 1");
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const auto extra = static_cast<std::size_t>(std::min<std::size_t>(workers, count)) - 1;
  std::vector<std::thread> pool;
  pool.reserve(extra);
  for (std::size_t t = 0; t < extra; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string structure_key(const DecisionTree& tree) {
  auto zeros = [](auto&& self, const DecisionTree& t) -> DecisionTree {
    if (t.is_leaf()) return DecisionTree::leaf(false);
    return DecisionTree::query(t.var(), self(self, t.on0()), self(self, t.on1()));
  };
  return serialize(zeros(zeros, tree));
}

namespace {

constexpr double kSigmas = 3.0;

NamedCells meta_for(const ExperimentConfig& c) {
  return {
      {"experiment", std::string(to_string(c.experiment))},
      {"model", std::string(to_string(c.model))},
      {"d", std::int64_t{c.d}},
      {"n", std::int64_t{c.n}},
      {"samples", c.samples},
      {"seed", std::to_string(c.seed)},
      {"epsilon", c.epsilon},
      {"h", c.h ? Cell{std::int64_t{*c.h}} : Cell{std::string()}},
      {"exhaustive_leaf_cap", std::int64_t{c.exhaustive_leaf_cap}},
      {"exact_depth_cap", std::int64_t{c.exact_depth_cap}},
      {"assignments_per_structure", std::int64_t{c.assignments_per_structure}},
      {"flips_per_tree", std::int64_t{c.flips_per_tree}},
      {"sigma_rule", std::string("statistical checks accept within 3 sigma")},
  };
}

std::string dyadic_text(const Dyadic& v) { return v.to_string(); }
Dyadic dyadic_cell(const Cell& c) { return Dyadic::parse(render(c)); }

double binomial_sigma(double p, double m) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / m); }

double log2_big(const BigCount& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

// Every leaf of the tree with a 0 label; assemble() input for stage two.
LeafAssignment zeros(std::size_t leaves) { return {std::vector<bool>(leaves, false)}; }

void finish(Report& report) { report.aggregates = recompute_aggregates(report); }

// ---------------------------------------------------------------------------
// lemma3

std::vector<Cell> lemma3_row(const ExperimentConfig& c, const TreeSampler& sampler, std::size_t i) {
  RandomStream rng = RandomStream(c.seed).substream(i);
  const Structure s = structure_of(sampler(rng));
  const LeafProfile profile = leaf_profile(s);
  const std::size_t leaves = profile.size();
  const Dyadic formula = expected_sensitivity_over_leaves(s);

  // Var[s(T_z)] <= (1/4) sum_l c_l^2, c_l = per-leaf bounded difference.
  double c2 = 0.0;
  for (int depth : profile.depths) {
    const double cl = lipschitz_term(depth).to_double();
    c2 += cl * cl;
  }
  const double sd_bound = std::sqrt(c2 / 4.0);

  std::vector<Cell> row{static_cast<std::int64_t>(i), static_cast<std::int64_t>(leaves),
                        std::int64_t{profile.min_depth()}, std::int64_t{profile.max_depth()}};

  if (leaves <= static_cast<std::size_t>(c.exhaustive_leaf_cap)) {
    // Gray-code walk: consecutive assignments differ in one leaf.
    DecisionTree current = assemble(s, zeros(leaves));
    Dyadic sum = avg_sensitivity_structural(current);
    const std::uint64_t total = std::uint64_t{1} << leaves;
    for (std::uint64_t k = 1; k < total; ++k) {
      current = with_leaf_flipped(current, static_cast<std::size_t>(std::countr_zero(k)));
      sum += avg_sensitivity_structural(current);
    }
    const Dyadic mean = sum.scaled(-static_cast<std::int64_t>(leaves));
    row.insert(row.end(), {std::string("exhaustive"), static_cast<std::int64_t>(total), dyadic_text(formula),
                           dyadic_text(mean), mean.to_double(), 0.0, 0.0, 0.0});
    return row;
  }

  const int m = c.assignments_per_structure;
  Dyadic sum;
  double sum_sq = 0.0;
  LeafAssignment z = zeros(leaves);
  for (int j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < leaves; ++l) z.bits[l] = rng.next_bit();
    const Dyadic value = avg_sensitivity_structural(assemble(s, z));
    sum += value;
    const double v = value.to_double();
    sum_sq += v * v;
  }
  const double mean = sum.to_double() / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1));
  const double std_error = std::sqrt(var / m);
  const double sigma = sd_bound / std::sqrt(static_cast<double>(m));
  const double z_score = sigma > 0 ? (mean - formula.to_double()) / sigma : 0.0;
  row.insert(row.end(), {std::string("sampled"), std::int64_t{m}, dyadic_text(formula), std::string(), mean,
                         std_error, sigma, z_score});
  return row;
}

NamedCells lemma3_aggregates(const Report& r) {
  const auto mode = r.column("mode");
  const auto formula = r.column("formula");
  const auto mean_exact = r.column("mean_exact");
  const auto mean = r.column("mean");
  const auto sigma = r.column("sigma_bound");
  std::int64_t exhaustive = 0, exact = 0, sampled = 0, within = 0;
  double max_abs_z = 0.0;
  for (const auto& row : r.rows) {
    const Dyadic f = dyadic_cell(row[formula]);
    if (render(row[mode]) == "exhaustive") {
      ++exhaustive;
      if (dyadic_cell(row[mean_exact]) == f) ++exact;
    } else {
      ++sampled;
      const double dev = std::abs(as_double(row[mean]) - f.to_double());
      const double s = as_double(row[sigma]);
      if (dev <= kSigmas * s) ++within;
      if (s > 0) max_abs_z = std::max(max_abs_z, dev / s);
    }
  }
  return {{"structures", static_cast<std::int64_t>(r.rows.size())},
          {"exhaustive", exhaustive},
          {"exhaustive_exact_matches", exact},
          {"sampled", sampled},
          {"sampled_within_3sigma", within},
          {"max_abs_z", max_abs_z}};
}

// ---------------------------------------------------------------------------
// lemma4

std::vector<std::vector<Cell>> lemma4_rows(const ExperimentConfig& c, const TreeSampler& sampler,
                                           std::size_t i) {
  RandomStream rng = RandomStream(c.seed).substream(i);
  const DecisionTree tree = sampler(rng);
  const LeafProfile profile = leaf_profile(tree);
  const Dyadic bound = lipschitz_bound(profile);
  const Dyadic base = avg_sensitivity_structural(tree);

  std::vector<std::size_t> chosen(profile.size());
  for (std::size_t l = 0; l < chosen.size(); ++l) chosen[l] = l;
  const auto cap = static_cast<std::size_t>(c.flips_per_tree);
  if (chosen.size() > cap) {
    // Partial Fisher-Yates: a uniform subset of `cap` leaves.
    for (std::size_t k = 0; k < cap; ++k) {
      const std::size_t r = k + rng.uniform_below(chosen.size() - k);
      std::swap(chosen[k], chosen[r]);
    }
    chosen.resize(cap);
    std::sort(chosen.begin(), chosen.end());
  }

  std::vector<std::vector<Cell>> rows;
  for (std::size_t leaf : chosen) {
    const Dyadic delta = (avg_sensitivity_structural(with_leaf_flipped(tree, leaf)) - base).abs();
    const double ratio = bound.is_zero() ? 0.0 : delta.to_double() / bound.to_double();
    rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(leaf),
                    std::int64_t{profile.depths[leaf]}, dyadic_text(delta), dyadic_text(bound), ratio,
                    std::int64_t{delta <= bound ? 1 : 0}});
  }
  return rows;
}

NamedCells lemma4_aggregates(const Report& r) {
  const auto delta = r.column("delta");
  const auto bound = r.column("bound");
  const auto ratio = r.column("ratio");
  std::int64_t violations = 0;
  double max_ratio = 0.0;
  for (const auto& row : r.rows) {
    if (dyadic_cell(row[delta]) > dyadic_cell(row[bound])) ++violations;
    max_ratio = std::max(max_ratio, as_double(row[ratio]));
  }
  return {{"cases", static_cast<std::int64_t>(r.rows.size())},
          {"violations", violations},
          {"max_ratio", max_ratio}};
}

// ---------------------------------------------------------------------------
// lemma5

int default_threshold(int d) {
  if (d < 1) return 0;
  return static_cast<int>(std::floor(d - std::log2(static_cast<double>(d)) - 2.0));
}

bool lemma5_exact_mode(const ExperimentConfig& c) {
  return c.model == Model::ShapeUniform && c.d <= c.exact_depth_cap;
}

NamedCells lemma5_aggregates(const Report& r) {
  if (render(r.meta_value("lemma5_mode")) == "exact") {
    const int d = static_cast<int>(as_int(r.meta_value("d")));
    const auto h_col = r.column("h");
    const auto in_range = r.column("in_range");
    std::int64_t in_range_rows = 0, dominated = 0;
    for (const auto& row : r.rows) {
      if (as_int(row[in_range]) == 0) continue;
      ++in_range_rows;
      if (leaf_depth_tail_dominates(d, static_cast<int>(as_int(row[h_col])))) ++dominated;
    }
    return {{"rows", static_cast<std::int64_t>(r.rows.size())},
            {"in_range_rows", in_range_rows},
            {"dominated_in_range", dominated}};
  }
  const auto event = r.column("event");
  std::int64_t events = 0;
  for (const auto& row : r.rows) events += as_int(row[event]);
  const auto m = static_cast<double>(r.rows.size());
  const double freq = events / m;
  return {{"samples", static_cast<std::int64_t>(r.rows.size())},
          {"events", events},
          {"frequency", freq},
          {"sigma", binomial_sigma(freq, m)}};
}

// ---------------------------------------------------------------------------
// theorem1

Dyadic nearest_rank(const std::vector<Dyadic>& sorted, double p) {
  const auto m = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m);
  return sorted[rank - 1];
}

NamedCells theorem1_aggregates(const Report& r) {
  const int d = static_cast<int>(as_int(r.meta_value("d")));
  const double eps = as_double(r.meta_value("epsilon"));
  const Dyadic threshold = Dyadic::from_double((1.0 - eps) * d / 3.0);
  const auto sbar_col = r.column("sbar");
  const auto q2_col = r.column("q2_lower_bound");

  std::vector<Dyadic> values;
  values.reserve(r.rows.size());
  std::int64_t tail = 0, range_violations = 0, q2_mismatches = 0;
  Dyadic sum;
  for (const auto& row : r.rows) {
    const Dyadic s = dyadic_cell(row[sbar_col]);
    if (s < threshold) ++tail;
    if (s < Dyadic(0) || s > Dyadic(d)) ++range_violations;
    const double expected_q2 = s.to_double() / 18.0;
    if (std::abs(as_double(row[q2_col]) - expected_q2) > 1e-12 * expected_q2) ++q2_mismatches;
    sum += s;
    values.push_back(s);
  }
  std::sort(values.begin(), values.end());
  const auto m = static_cast<double>(values.size());
  const double freq = tail / m;
  return {{"samples", static_cast<std::int64_t>(values.size())},
          {"mean_sbar", sum.to_double() / m},
          {"min_sbar", dyadic_text(values.front())},
          {"p01_sbar", dyadic_text(nearest_rank(values, 0.01))},
          {"median_sbar", dyadic_text(nearest_rank(values, 0.5))},
          {"p99_sbar", dyadic_text(nearest_rank(values, 0.99))},
          {"max_sbar", dyadic_text(values.back())},
          {"tail_events", tail},
          {"tail_frequency", freq},
          {"tail_sigma", binomial_sigma(freq, m)},
          {"range_violations", range_violations},
          {"q2_mismatches", q2_mismatches}};
}

// ---------------------------------------------------------------------------
// model-compare

NamedCells model_compare_aggregates(const Report& r) {
  const auto leaves = r.column("leaf_count");
  const auto full = r.column("hits_full");
  const auto two = r.column("hits_two_stage");
  std::int64_t total_full = 0, total_two = 0, root_full = 0, root_two = 0;
  for (const auto& row : r.rows) {
    total_full += as_int(row[full]);
    total_two += as_int(row[two]);
    if (as_int(row[leaves]) == 1) {
      root_full += as_int(row[full]);
      root_two += as_int(row[two]);
    }
  }
  double tv = 0.0;
  for (const auto& row : r.rows) {
    tv += std::abs(as_int(row[full]) / static_cast<double>(total_full) -
                   as_int(row[two]) / static_cast<double>(total_two));
  }
  return {{"samples_full", total_full},
          {"samples_two_stage", total_two},
          {"empirical_tv", tv / 2.0},
          {"root_leaf_freq_full", root_full / static_cast<double>(total_full)},
          {"root_leaf_freq_two_stage", root_two / static_cast<double>(total_two)}};
}

}  // namespace

// ---------------------------------------------------------------------------

Report run_lemma3(const ExperimentConfig& c) {
  c.validate();
  const TreeSampler sampler(c.model, c.d, c.n);
  Report report;
  report.meta = meta_for(c);
  report.columns = {"structure_id", "leaf_count", "min_depth", "max_depth", "mode", "assignments",
                    "formula", "mean_exact", "mean", "std_error", "sigma_bound", "z"};
  report.rows.resize(static_cast<std::size_t>(c.samples));
  parallel_for(report.rows.size(), c.workers, [&](std::size_t i) { report.rows[i] = lemma3_row(c, sampler, i); });
  finish(report);
  report.theory = {{"formula", std::string("(1/2) sum_l d(l) 2^-d(l)")},
                   {"sigma_bound_rule", std::string("sqrt(sum_l c_l^2 / 4 / m), c_l = d(l) 2^(1-d(l))")}};
  const auto exhaustive = as_int(report.aggregate("exhaustive"));
  const auto sampled = as_int(report.aggregate("sampled"));
  report.checks.push_back({"lemma3.exhaustive_exact", as_int(report.aggregate("exhaustive_exact_matches")) == exhaustive,
                           render(report.aggregate("exhaustive_exact_matches")) + " of " + std::to_string(exhaustive) +
                               " exhaustive means equal the formula"});
  report.checks.push_back({"lemma3.sampled_within_3sigma", as_int(report.aggregate("sampled_within_3sigma")) == sampled,
                           render(report.aggregate("sampled_within_3sigma")) + " of " + std::to_string(sampled) +
                               " sampled means within 3 sigma"});
  return report;
}

Report run_lemma4(const ExperimentConfig& c) {
  c.validate();
  const TreeSampler sampler(c.model, c.d, c.n);
  Report report;
  report.meta = meta_for(c);
  report.columns = {"tree_id", "leaf_index", "leaf_depth", "delta", "bound", "ratio", "within"};
  std::vector<std::vector<std::vector<Cell>>> per_tree(static_cast<std::size_t>(c.samples));
  parallel_for(per_tree.size(), c.workers, [&](std::size_t i) { per_tree[i] = lemma4_rows(c, sampler, i); });
  for (auto& rows : per_tree) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  finish(report);

  constexpr int kTightnessVars = 10;
  const Dyadic low = avg_sensitivity_structural(trees::tightness_family(kTightnessVars, false));
  const Dyadic high = avg_sensitivity_structural(trees::tightness_family(kTightnessVars, true));
  const Dyadic tight_delta = (high - low).abs();
  const Dyadic tight_bound = lipschitz_bound(leaf_profile(trees::tightness_family(kTightnessVars, false)));
  const double tight_ratio = tight_delta.to_double() / tight_bound.to_double();
  report.theory = {{"tightness_n", std::int64_t{kTightnessVars}},
                   {"tightness_sbar_alpha0", dyadic_text(low)},
                   {"tightness_sbar_alpha1", dyadic_text(high)},
                   {"tightness_delta", dyadic_text(tight_delta)},
                   {"tightness_bound", dyadic_text(tight_bound)},
                   {"tightness_ratio", tight_ratio}};
  report.checks.push_back({"lemma4.delta_within_bound", as_int(report.aggregate("violations")) == 0,
                           render(report.aggregate("violations")) + " violations in " +
                               render(report.aggregate("cases")) + " flips"});
  report.checks.push_back({"lemma4.tightness_ratio", tight_ratio >= 0.9,
                           "ratio " + render(Cell{tight_ratio}) + " (need >= 0.9)"});
  return report;
}

Report run_lemma5(const ExperimentConfig& c) {
  c.validate();
  Report report;
  report.meta = meta_for(c);
  const bool exact = lemma5_exact_mode(c);
  report.meta.emplace_back("lemma5_mode", std::string(exact ? "exact" : "monte-carlo"));

  if (exact) {
    report.columns = {"h", "in_range", "probability", "bound", "bound_log2", "dominated"};
    for (int h = 0; h <= c.d; ++h) {
      const BoundValue b = leaf_depth_tail(c.d, h);
      report.rows.push_back({std::int64_t{h}, std::int64_t{b.in_range ? 1 : 0},
                             nearest_double(low_leaf_probability(c.d, h)), b.clamped, b.log2,
                             std::int64_t{leaf_depth_tail_dominates(c.d, h) ? 1 : 0}});
    }
    finish(report);
    report.theory = {{"count_shapes_log2", log2_big(count_shapes(c.d))}};
    report.checks.push_back(
        {"lemma5.exact_dominance",
         as_int(report.aggregate("dominated_in_range")) == as_int(report.aggregate("in_range_rows")),
         render(report.aggregate("dominated_in_range")) + " of " + render(report.aggregate("in_range_rows")) +
             " in-range thresholds dominated"});
    return report;
  }

  const int h = c.h.value_or(default_threshold(c.d));
  const TreeSampler sampler(c.model, c.d, c.n);
  report.columns = {"tree_id", "min_leaf_depth", "leaf_count", "event"};
  report.rows.resize(static_cast<std::size_t>(c.samples));
  parallel_for(report.rows.size(), c.workers, [&](std::size_t i) {
    RandomStream rng = RandomStream(c.seed).substream(i);
    const LeafProfile profile = leaf_profile(sampler(rng));
    report.rows[i] = {static_cast<std::int64_t>(i), std::int64_t{profile.min_depth()},
                      static_cast<std::int64_t>(profile.size()),
                      std::int64_t{profile.min_depth() <= h ? 1 : 0}};
  });
  finish(report);

  const BoundValue b = leaf_depth_tail(c.d, h);
  report.theory = {{"h", std::int64_t{h}},
                   {"bound_raw", b.raw},
                   {"bound_clamped", b.clamped},
                   {"bound_log2", b.log2},
                   {"bound_binding", std::int64_t{b.in_range ? 1 : 0}}};
  const double freq = as_double(report.aggregate("frequency"));
  const double sigma = as_double(report.aggregate("sigma"));
  if (b.in_range) {
    report.checks.push_back({"lemma5.tail_bound", freq <= b.clamped + kSigmas * sigma,
                             "frequency " + render(Cell{freq}) + " vs bound " + render(Cell{b.clamped})});
  }
  if (c.model != Model::ShapeUniform && c.d <= c.exact_depth_cap) {
    const double shape_exact = nearest_double(low_leaf_probability(c.d, h));
    report.theory.emplace_back("shape_uniform_exact", shape_exact);
    report.checks.push_back({"lemma5.labeled_not_above_shape", freq <= shape_exact + kSigmas * sigma,
                             "frequency " + render(Cell{freq}) + " vs shape-uniform " + render(Cell{shape_exact})});
  }
  return report;
}

Report run_theorem1(const ExperimentConfig& c) {
  c.validate();
  const TreeSampler sampler(c.model, c.d, c.n);
  Report report;
  report.meta = meta_for(c);
  report.columns = {"tree_id", "sbar", "sbar_float", "min_leaf_depth", "leaf_count", "expected_sbar",
                    "q2_lower_bound"};
  report.rows.resize(static_cast<std::size_t>(c.samples));
  parallel_for(report.rows.size(), c.workers, [&](std::size_t i) {
    RandomStream rng = RandomStream(c.seed).substream(i);
    const DecisionTree tree = sampler(rng);
    const Dyadic sbar = avg_sensitivity_structural(tree);
    const LeafProfile profile = leaf_profile(tree);
    report.rows[i] = {static_cast<std::int64_t>(i),
                      dyadic_text(sbar),
                      sbar.to_double(),
                      std::int64_t{profile.min_depth()},
                      static_cast<std::int64_t>(profile.size()),
                      dyadic_text(expected_sensitivity_over_leaves(tree)),
                      shi_lower_bound(sbar.to_double(), 1.0 / 3.0)};
  });
  finish(report);

  const Theorem1Tail t = theorem1_tail(c.d, c.epsilon);
  report.theory = {{"threshold", t.threshold},
                   {"tail_raw", t.total.raw},
                   {"tail_clamped", t.total.clamped},
                   {"tail_log2", t.total.log2},
                   {"leaf_term_log2", t.leaf_term.log2},
                   {"concentration_term_log2", t.concentration_term.log2},
                   {"alpha", alpha_for(c.epsilon)}};
  const double freq = as_double(report.aggregate("tail_frequency"));
  const double sigma = as_double(report.aggregate("tail_sigma"));
  report.checks.push_back({"theorem1.tail_consistent", freq <= t.total.clamped + kSigmas * sigma,
                           "frequency " + render(Cell{freq}) + " vs tail " + render(Cell{t.total.clamped})});
  report.checks.push_back({"theorem1.sbar_range", as_int(report.aggregate("range_violations")) == 0,
                           render(report.aggregate("range_violations")) + " values outside [0, d]"});
  report.checks.push_back({"theorem1.q2_column", as_int(report.aggregate("q2_mismatches")) == 0,
                           render(report.aggregate("q2_mismatches")) + " rows differ from sbar/18"});
  return report;
}

Report run_model_compare(const ExperimentConfig& c) {
  c.validate();
  const TreeSampler full(Model::FullUniform, c.d, c.n);
  const TreeSampler two(Model::StructureTwoStage, c.d, c.n);
  const RandomStream master(c.seed);
  const RandomStream full_root = master.substream(0);
  const RandomStream two_root = master.substream(1);

  const auto m = static_cast<std::size_t>(c.samples);
  std::vector<std::string> keys_full(m), keys_two(m);
  std::vector<std::int64_t> leaves_full(m), leaves_two(m);
  parallel_for(m, c.workers, [&](std::size_t i) {
    RandomStream a = full_root.substream(i);
    RandomStream b = two_root.substream(i);
    const DecisionTree tf = full(a);
    const DecisionTree tt = two(b);
    keys_full[i] = structure_key(tf);
    keys_two[i] = structure_key(tt);
    leaves_full[i] = static_cast<std::int64_t>(leaf_count(tf));
    leaves_two[i] = static_cast<std::int64_t>(leaf_count(tt));
  });

  struct Tally {
    std::int64_t leaves = 0, full = 0, two = 0;
  };
  std::map<std::string, Tally> tally;
  for (std::size_t i = 0; i < m; ++i) {
    auto& f = tally[keys_full[i]];
    f.leaves = leaves_full[i];
    ++f.full;
    auto& t = tally[keys_two[i]];
    t.leaves = leaves_two[i];
    ++t.two;
  }

  const BigCount labeled = count_labeled(c.d, c.n);
  const BigCount structures = count_structures(c.d, c.n);
  auto p_full = [&](std::int64_t leaves) {
    mpq_class p(BigCount(1) << static_cast<mp_bitcnt_t>(leaves), labeled);
    p.canonicalize();
    return p;
  };
  const mpq_class p_two(1, structures);

  Report report;
  report.meta = meta_for(c);
  report.columns = {"structure", "leaf_count", "hits_full", "hits_two_stage", "p_full_exact", "p_two_exact"};
  for (const auto& [key, t] : tally) {
    report.rows.push_back({key, t.leaves, t.full, t.two, nearest_double(p_full(t.leaves)), nearest_double(p_two)});
  }
  finish(report);

  // Exact TV distance and the delta-method sigma of its plug-in estimate,
  // both grouped by leaf count since the probabilities depend only on it.
  const auto by_leaves = structures_by_leaf_count(c.d, c.n);
  mpq_class tv = 0;
  double ef = 0, ef2 = 0, et = 0, et2 = 0;
  for (std::size_t l = 1; l < by_leaves.size(); ++l) {
    if (by_leaves[l] == 0) continue;
    const mpq_class diff = p_full(static_cast<std::int64_t>(l)) - p_two;
    tv += abs(diff) * by_leaves[l];
    const double sign = sgn(diff);
    const double wf = nearest_double(p_full(static_cast<std::int64_t>(l)) * by_leaves[l]);
    const double wt = nearest_double(p_two * by_leaves[l]);
    ef += wf * sign;
    ef2 += wf * sign * sign;
    et += wt * sign;
    et2 += wt * sign * sign;
  }
  tv /= 2;
  const double var_sign = (ef2 - ef * ef) + (et2 - et * et);
  const double tv_sigma = 0.5 * std::sqrt(std::max(0.0, var_sign) / static_cast<double>(m));
  const bool tv_binding = structures * 10 <= static_cast<unsigned long>(m);

  const double root_full = nearest_double(mpq_class(2) / labeled);
  const double root_two = nearest_double(p_two);
  report.theory = {{"structure_count", structures.get_str()},
                   {"labeled_count", labeled.get_str()},
                   {"exact_tv", nearest_double(tv)},
                   {"tv_sigma", tv_sigma},
                   {"tv_binding", std::int64_t{tv_binding ? 1 : 0}},
                   {"root_leaf_exact_full", root_full},
                   {"root_leaf_exact_two_stage", root_two}};

  const double md = static_cast<double>(m);
  const double emp_tv = as_double(report.aggregate("empirical_tv"));
  if (tv_binding) {
    report.checks.push_back({"model_compare.tv", std::abs(emp_tv - nearest_double(tv)) <= kSigmas * tv_sigma,
                             "empirical " + render(Cell{emp_tv}) + " vs exact " + render(Cell{nearest_double(tv)})});
  }
  const double rf = as_double(report.aggregate("root_leaf_freq_full"));
  const double rt = as_double(report.aggregate("root_leaf_freq_two_stage"));
  report.checks.push_back({"model_compare.root_leaf_full",
                           std::abs(rf - root_full) <= kSigmas * binomial_sigma(root_full, md),
                           "frequency " + render(Cell{rf}) + " vs exact " + render(Cell{root_full})});
  report.checks.push_back({"model_compare.root_leaf_two_stage",
                           std::abs(rt - root_two) <= kSigmas * binomial_sigma(root_two, md),
                           "frequency " + render(Cell{rt}) + " vs exact " + render(Cell{root_two})});
  return report;
}

Report run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::Lemma3: return run_lemma3(config);
    case Experiment::Lemma4: return run_lemma4(config);
    case Experiment::Lemma5: return run_lemma5(config);
    case Experiment::Theorem1: return run_theorem1(config);
    case Experiment::ModelCompare: return run_model_compare(config);
  }
  throw UsageError("unknown experiment");
}

NamedCells recompute_aggregates(const Report& report) {
  const auto name = parse_experiment(render(report.meta_value("experiment")));
  if (!name) throw UsageError("report names an unknown experiment");
  switch (*name) {
    case Experiment::Lemma3: return lemma3_aggregates(report);
    case Experiment::Lemma4: return lemma4_aggregates(report);
    case Experiment::Lemma5: return lemma5_aggregates(report);
    case Experiment::Theorem1: return theorem1_aggregates(report);
    case Experiment::ModelCompare: return model_compare_aggregates(report);
  }
  return {};
}

std::vector<std::string> verify_report(const Report& report) {
  std::vector<std::string> problems;
  const NamedCells fresh = recompute_aggregates(report);
  if (fresh.size() != report.aggregates.size()) {
    problems.push_back("aggregate count differs: stored " + std::to_string(report.aggregates.size()) +
                       ", recomputed " + std::to_string(fresh.size()));
  }
  for (const auto& [key, value] : fresh) {
    const auto it = std::find_if(report.aggregates.begin(), report.aggregates.end(),
                                 [&](const auto& kv) { return kv.first == key; });
    if (it == report.aggregates.end()) {
      problems.push_back("missing aggregate " + key);
    } else if (render(it->second) != render(value)) {
      problems.push_back(key + ": stored " + render(it->second) + ", recomputed " + render(value));
    }
  }
  return problems;
}

}  // namespace dtq
