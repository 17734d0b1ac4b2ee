#include "clockaoi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "clockaoi/errors.hpp"

namespace clockaoi {

namespace {

using nlohmann::json;

std::vector<std::int64_t> inclusive_range(std::int64_t from, std::int64_t to, std::int64_t step = 1) {
  std::vector<std::int64_t> out;
  for (std::int64_t v = from; v <= to; v += step) out.push_back(v);
  return out;
}

std::vector<std::int64_t> parse_int_field(const json& node, const std::string& field, std::int64_t minimum) {
  auto bad = [&](const std::string& why) -> std::vector<std::int64_t> {
    throw ConfigError("grid field '" + field + "': " + why);
  };
  std::vector<std::int64_t> out;
  if (node.is_number_integer()) {
    out.push_back(node.get<std::int64_t>());
  } else if (node.is_array()) {
    for (const auto& v : node) {
      if (!v.is_number_integer()) return bad("list entries must be integers");
      out.push_back(v.get<std::int64_t>());
    }
  } else if (node.is_object()) {
    if (!node.contains("from") || !node.contains("to")) return bad("range needs 'from' and 'to'");
    const auto from = node.at("from").get<std::int64_t>();
    const auto to = node.at("to").get<std::int64_t>();
    const auto step = node.value("step", std::int64_t{1});
    if (step < 1) return bad("step must be positive");
    out = inclusive_range(from, to, step);
  } else {
    return bad("expected an integer, a list, or {from, to, step}");
  }
  if (out.empty()) return bad("empty range");
  for (auto v : out)
    if (v < minimum) return bad(fmt::format("values must be at least {}, got {}", minimum, v));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Rational> parse_probability_field(const json& node) {
  std::vector<Rational> out;
  auto one = [&](const json& v) {
    Rational q;
    try {
      if (v.is_string()) q = parse_rational(v.get<std::string>());
      else if (v.is_number_integer()) q = make_rational(v.get<std::int64_t>());
      else if (v.is_number()) q = parse_rational(v.dump());  // shortest decimal form, e.g. 0.1
      else throw ConfigError("grid field 'p': entries must be numbers or rational strings");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("grid field 'p': ") + e.what());
    }
    if (q <= 0 || q > 1) throw ConfigError("grid field 'p': values must lie in (0, 1]");
    out.push_back(q);
  };
  if (node.is_array()) {
    for (const auto& v : node) one(v);
  } else {
    one(node);
  }
  if (out.empty()) throw ConfigError("grid field 'p': empty list");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string decimal_label(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return fmt::format("{}", q.get_d());
}

struct Outcome {
  bool ok = false;
  double error = 0;
  std::int64_t bin = 0;
  bool within_bound = true;
};

Outcome evaluate(const SystemConfig& cfg, const SweepOptions& options) {
  Outcome out;
  try {
    const Rational tol = options.tol_relative * expected_approx_extended(cfg).center;
    const Rational err = relative_error(cfg, tol);
    out.error = err.get_d();
    out.bin = floor_of(err / options.bin_width);
    // Decided on the exact value; a truncated sum can sit just past a band edge.
    const Rational exact = expected_exact_extended_closed(cfg);
    out.within_bound = abs(exact - expected_approx_extended(cfg).center) / exact <= rel_error_bound_extended(cfg);
    out.ok = true;
  } catch (const std::exception&) {
    out.ok = false;
  }
  return out;
}

double nearest_rank(const std::vector<double>& sorted, double q) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Histogram build_histogram(const std::vector<const Outcome*>& outcomes, const Rational& bin_width) {
  Histogram h;
  h.bin_width = bin_width;
  double sum = 0;
  for (const Outcome* o : outcomes) {
    if (!o->ok) {
      ++h.n_skipped;
      continue;
    }
    ++h.bins[o->bin];
    ++h.count_total;
    sum += o->error;
    h.raw_errors.push_back(o->error);
  }
  if (h.count_total > 0) {
    h.mean = sum / static_cast<double>(h.count_total);
    std::vector<double> sorted = h.raw_errors;
    std::sort(sorted.begin(), sorted.end());
    h.q01 = nearest_rank(sorted, 0.01);
    h.q50 = nearest_rank(sorted, 0.50);
    h.q99 = nearest_rank(sorted, 0.99);
  }
  return h;
}

std::string render_histogram(const Histogram& h) {
  // Always cover [-1, 1]; extend to include any outlying bins.
  std::int64_t lo = floor_of(Rational(-1) / h.bin_width);
  std::int64_t hi = ceil_of(Rational(1) / h.bin_width) - 1;
  if (!h.bins.empty()) {
    lo = std::min(lo, h.bins.begin()->first);
    hi = std::max(hi, h.bins.rbegin()->first);
  }
  std::string out = "bin_left,bin_right,count\n";
  for (std::int64_t i = lo; i <= hi; ++i) {
    auto it = h.bins.find(i);
    const std::int64_t count = it == h.bins.end() ? 0 : it->second;
    out += fmt::format("{},{},{}\n", to_double(h.bin_width * i), to_double(h.bin_width * (i + 1)), count);
  }
  return out;
}

std::string summary_row(const std::string& parameter, const std::string& value, const Histogram& h) {
  if (h.count_total == 0)
    return fmt::format("{},{},,,,,{},{}\n", parameter, value, h.count_total, h.n_skipped);
  return fmt::format("{},{},{},{},{},{},{},{}\n", parameter, value, h.mean, h.q01, h.q50, h.q99, h.count_total,
                     h.n_skipped);
}

json int_list(const std::vector<std::int64_t>& v) { return json(v); }

}  // namespace

SweepGrid SweepGrid::defaults() {
  SweepGrid g;
  g.A = g.B = g.N = inclusive_range(2, 21);
  g.a = g.b = g.n = inclusive_range(1, 11);
  g.delta_b = g.delta_n = inclusive_range(0, 20);
  g.p = {make_rational(1, 10), make_rational(1, 2), make_rational(1)};
  return g;
}

SweepGrid parse_grid(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("grid file must hold a JSON object");

  static const std::vector<std::string> known = {"period_mode", "A", "B", "N", "a", "b", "n",
                                                 "delta_B", "delta_N", "p", "comment"};
  for (const auto& [key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("grid file: unknown field '" + key + "'");

  SweepGrid g = SweepGrid::defaults();
  if (doc.contains("period_mode")) {
    const auto mode = doc.at("period_mode").get<std::string>();
    if (mode == "cofactor") g.mode = PeriodMode::cofactor;
    else if (mode == "direct") g.mode = PeriodMode::direct;
    else throw ConfigError("grid field 'period_mode' must be 'cofactor' or 'direct'");
  }
  try {
    auto field = [&](const char* name, std::vector<std::int64_t>& target, std::int64_t minimum) {
      if (doc.contains(name)) target = parse_int_field(doc.at(name), name, minimum);
    };
    field("A", g.A, 1);
    field("B", g.B, 1);
    field("N", g.N, 1);
    field("a", g.a, 1);
    field("b", g.b, 1);
    field("n", g.n, 1);
    field("delta_B", g.delta_b, 0);
    field("delta_N", g.delta_n, 0);
    if (doc.contains("p")) g.p = parse_probability_field(doc.at("p"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid file: ") + e.what());
  }
  return g;
}

SweepGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read grid file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

std::string parameter_name(SweepParameter param, PeriodMode mode) {
  const bool direct = mode == PeriodMode::direct;
  switch (param) {
    case SweepParameter::A: return direct ? "A'" : "A";
    case SweepParameter::B: return direct ? "B'" : "B";
    case SweepParameter::N: return direct ? "N'" : "N";
    case SweepParameter::a: return "a";
    case SweepParameter::b: return "b";
    case SweepParameter::n: return "n";
    case SweepParameter::delta_b: return "delta_B";
    case SweepParameter::delta_n: return "delta_N";
    case SweepParameter::p: return "p";
  }
  return "?";
}

std::string parameter_file_key(SweepParameter param, PeriodMode mode) {
  const bool direct = mode == PeriodMode::direct;
  switch (param) {
    case SweepParameter::A: return direct ? "Ap" : "cofA";
    case SweepParameter::B: return direct ? "Bp" : "cofB";
    case SweepParameter::N: return direct ? "Np" : "cofN";
    case SweepParameter::a: return "gcda";
    case SweepParameter::b: return "gcdb";
    case SweepParameter::n: return "gcdn";
    case SweepParameter::delta_b: return "dB";
    case SweepParameter::delta_n: return "dN";
    case SweepParameter::p: return "p";
  }
  return "x";
}

Enumeration enumerate_configs(const SweepGrid& grid) {
  for (const auto* v : {&grid.A, &grid.B, &grid.N, &grid.a, &grid.b, &grid.n, &grid.delta_b, &grid.delta_n})
    if (v->empty()) throw ConfigError("sweep grid has an empty range");
  if (grid.p.empty()) throw ConfigError("sweep grid has an empty p list");

  Enumeration out;
  auto& st = out.stats;

  auto emit = [&](const PeriodDecomposition& d, std::map<SweepParameter, Rational> base) {
    for (auto db : grid.delta_b)
      for (auto dn : grid.delta_n)
        for (const auto& p : grid.p) {
          SweepPoint pt{make_extended_config(d, db, dn, p), base};
          pt.coordinates[SweepParameter::delta_b] = db;
          pt.coordinates[SweepParameter::delta_n] = dn;
          pt.coordinates[SweepParameter::p] = p;
          out.points.push_back(std::move(pt));
          ++st.emitted;
        }
  };
  const auto shift_count = static_cast<std::int64_t>(grid.delta_b.size() * grid.delta_n.size() * grid.p.size());

  auto contains = [](const std::vector<std::int64_t>& v, std::int64_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  if (grid.mode == PeriodMode::cofactor) {
    for (auto A : grid.A) for (auto B : grid.B) for (auto N : grid.N)
    for (auto a : grid.a) for (auto b : grid.b) for (auto n : grid.n) {
      st.candidates += shift_count;
      std::optional<PeriodDecomposition> d;
      try {
        d = decompose(checked_mul(checked_mul(A, b), n), checked_mul(checked_mul(B, b), a),
                      checked_mul(checked_mul(N, n), a));
      } catch (const std::exception&) {
      }
      if (!d || d->processing_cofactor != A || d->generation_cofactor != B || d->network_cofactor != N ||
          d->gcd_gen_net != a || d->gcd_proc_gen != b || d->gcd_proc_net != n) {
        st.invalid_decomposition += shift_count;
        continue;
      }
      if (d->processing_period == d->generation_period && d->generation_period == d->network_period) {
        st.equal_periods += shift_count;
        continue;
      }
      emit(*d, {{SweepParameter::A, A}, {SweepParameter::B, B}, {SweepParameter::N, N},
                {SweepParameter::a, a}, {SweepParameter::b, b}, {SweepParameter::n, n}});
    }
  } else {
    for (auto Ap : grid.A) for (auto Bp : grid.B) for (auto Np : grid.N) {
      st.candidates += shift_count;
      std::optional<PeriodDecomposition> d;
      try {
        d = decompose(Ap, Bp, Np);
      } catch (const std::exception&) {
      }
      if (!d || !contains(grid.a, d->gcd_gen_net) || !contains(grid.b, d->gcd_proc_gen) ||
          !contains(grid.n, d->gcd_proc_net)) {
        st.invalid_decomposition += shift_count;
        continue;
      }
      if (Ap == Bp && Bp == Np) {
        st.equal_periods += shift_count;
        continue;
      }
      emit(*d, {{SweepParameter::A, Ap}, {SweepParameter::B, Bp}, {SweepParameter::N, Np},
                {SweepParameter::a, d->gcd_gen_net}, {SweepParameter::b, d->gcd_proc_gen},
                {SweepParameter::n, d->gcd_proc_net}});
    }
  }
  if (out.points.empty()) throw ConfigError("sweep grid is empty: every candidate configuration was excluded");
  return out;
}

Rational relative_error(const SystemConfig& cfg, const Rational& tol) {
  const Rational exact = expected_exact_extended(cfg, tol).value;
  if (exact == 0) throw std::domain_error("relative_error: expected AoI is zero; configuration excluded");
  return (exact - expected_approx_extended(cfg).center) / exact;
}

double Histogram::fraction_within(double lo, double hi) const {
  if (raw_errors.empty()) return 0;
  const auto inside = std::count_if(raw_errors.begin(), raw_errors.end(), [&](double e) { return lo <= e && e <= hi; });
  return static_cast<double>(inside) / static_cast<double>(raw_errors.size());
}

SweepResult run_sweep(const SweepGrid& grid, const SweepOptions& options) {
  if (options.bin_width <= 0) throw std::domain_error("bin width must be positive");
  if (options.tol_relative <= 0) throw std::domain_error("tol must be positive");

  SweepResult result;
  result.grid = grid;
  result.options = options;
  Enumeration en = enumerate_configs(grid);
  result.enumeration = en.stats;

  // Each worker fills distinct slots; aggregation below runs in enumeration order.
  std::vector<Outcome> outcomes(en.points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < en.points.size(); i = next++) outcomes[i] = evaluate(en.points[i].cfg, options);
  };
  const unsigned jobs = std::max(1u, options.jobs);
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::vector<const Outcome*> all;
  all.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    all.push_back(&o);
    if (o.ok) ++result.evaluated;
    else ++result.skipped;
    if (o.ok && !o.within_bound) ++result.bound_violations;
  }
  result.global = build_histogram(all, options.bin_width);

  for (SweepParameter param : kSweepParameters) {
    std::map<Rational, std::vector<const Outcome*>> groups;
    for (std::size_t i = 0; i < en.points.size(); ++i)
      groups[en.points[i].coordinates.at(param)].push_back(&outcomes[i]);
    for (auto& [value, members] : groups)
      result.slices.push_back({param, value, build_histogram(members, options.bin_width)});
  }
  return result;
}

std::map<std::string, std::string> render_sweep_outputs(const SweepResult& result) {
  const PeriodMode mode = result.grid.mode;
  std::map<std::string, std::string> files;
  files["hist_all.csv"] = render_histogram(result.global);

  std::string summary = "parameter,fixed_value,mean,q01,q50,q99,n_configs,n_skipped\n";
  summary += summary_row("all", "", result.global);
  json slice_index = json::array();
  for (const auto& slice : result.slices) {
    const std::string label = decimal_label(slice.value);
    const std::string name = "hist_" + parameter_file_key(slice.parameter, mode) + "_" + label + ".csv";
    files[name] = render_histogram(slice.histogram);
    summary += summary_row(parameter_name(slice.parameter, mode), label, slice.histogram);
    slice_index.push_back({{"parameter", parameter_name(slice.parameter, mode)}, {"value", label}, {"file", name}});
  }
  files["summary.csv"] = summary;

  const auto& g = result.grid;
  json p_list = json::array();
  for (const auto& p : g.p) p_list.push_back(to_fraction_string(p));
  json manifest = {
      {"grid",
       {{"period_mode", mode == PeriodMode::cofactor ? "cofactor" : "direct"},
        {"A", int_list(g.A)}, {"B", int_list(g.B)}, {"N", int_list(g.N)},
        {"a", int_list(g.a)}, {"b", int_list(g.b)}, {"n", int_list(g.n)},
        {"delta_B", int_list(g.delta_b)}, {"delta_N", int_list(g.delta_n)}, {"p", p_list}}},
      {"options",
       {{"tol_relative", to_fraction_string(result.options.tol_relative)},
        {"bin_width", to_fraction_string(result.options.bin_width)}}},
      {"enumeration",
       {{"candidates", result.enumeration.candidates},
        {"invalid_decomposition", result.enumeration.invalid_decomposition},
        {"equal_periods", result.enumeration.equal_periods},
        {"emitted", result.enumeration.emitted}}},
      {"evaluated", result.evaluated},
      {"skipped", result.skipped},
      {"bound_violations", result.bound_violations},
      {"slices", slice_index},
  };
  files["manifest.json"] = manifest.dump(2) + "\n";
  return files;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& [name, content] : render_sweep_outputs(result)) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  }
}

}  // namespace clockaoi
