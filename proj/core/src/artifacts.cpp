#include "metaimpact/artifacts.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "metaimpact/csv.hpp"
#include "metaimpact/errors.hpp"

namespace metaimpact {

using nlohmann::json;

namespace {

void append_field(std::string& out, double v) {
  out.push_back(',');
  csv::append_double(out, v);
}

void append_field(std::string& out, std::int64_t v) {
  out.push_back(',');
  csv::append_int(out, v);
}

void append_order(std::string& out, const HiddenOrder& o) {
  out.append(o.stock).push_back(',');
  out.append(o.member);
  append_field(out, std::int64_t{o.epsilon});
  append_field(out, o.start_ts);
  append_field(out, o.end_ts);
  append_field(out, static_cast<std::int64_t>(o.n_trades));
  append_field(out, o.signed_volume);
  append_field(out, o.T_seconds);
  append_field(out, o.dominant_fraction);
  append_field(out, static_cast<std::int64_t>(o.first_idx));
  append_field(out, static_cast<std::int64_t>(o.last_idx));
}

/// Typed access to one row with error messages naming file and line.
class RowParser {
 public:
  RowParser(const std::filesystem::path& path, const csv::Table& table, std::size_t r)
      : row_(table.rows[r]), where_(path.string() + ":" + std::to_string(table.line_numbers[r])) {}

  [[nodiscard]] const std::string& str(std::size_t k) const { return row_.at(k); }
  [[nodiscard]] std::int64_t integer(std::size_t k) const {
    auto v = csv::parse_int(row_.at(k));
    if (!v) fail(k, "integer");
    return *v;
  }
  [[nodiscard]] std::size_t index(std::size_t k) const {
    const auto v = integer(k);
    if (v < 0) fail(k, "non-negative integer");
    return static_cast<std::size_t>(v);
  }
  [[nodiscard]] double number(std::size_t k) const {
    auto v = csv::parse_double(row_.at(k));
    if (!v) fail(k, "number");
    return *v;
  }

 private:
  [[noreturn]] void fail(std::size_t k, const char* what) const {
    throw InputError(where_ + ": column " + std::to_string(k + 1) + " is not a valid " + what);
  }
  const std::vector<std::string>& row_;
  std::string where_;
};

HiddenOrder parse_order(const RowParser& p) {
  HiddenOrder o;
  o.stock = p.str(0);
  o.member = p.str(1);
  o.epsilon = static_cast<int>(p.integer(2));
  o.start_ts = p.integer(3);
  o.end_ts = p.integer(4);
  o.n_trades = p.index(5);
  o.signed_volume = p.number(6);
  o.T_seconds = p.number(7);
  o.dominant_fraction = p.number(8);
  o.first_idx = p.index(9);
  o.last_idx = p.index(10);
  return o;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_json(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }

json mean_se_json(const stats::MeanSE& m) {
  return json{{"mean", m.count ? number_or_null(m.mean) : json(nullptr)},
              {"se", optional_json(m.se)},
              {"count", m.count}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Orders

std::string hidden_orders_csv(std::span<const HiddenOrder> orders) {
  std::string out(kHiddenOrdersHeader);
  out.push_back('\n');
  for (const auto& o : orders) {
    append_order(out, o);
    out.push_back('\n');
  }
  return out;
}

std::vector<HiddenOrder> read_hidden_orders(const std::filesystem::path& path) {
  const auto table = csv::read_table(path, kHiddenOrdersHeader);
  std::vector<HiddenOrder> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) out.push_back(parse_order(RowParser(path, table, r)));
  return out;
}

std::string order_metrics_csv(std::span<const OrderMetrics> orders) {
  std::string out(kOrderMetricsHeader);
  out.push_back('\n');
  for (const auto& m : orders) {
    append_order(out, m.order);
    append_field(out, m.f_mo);
    append_field(out, m.alpha);
    out.push_back('\n');
  }
  return out;
}

std::vector<OrderMetrics> read_order_metrics(const std::filesystem::path& path) {
  const auto table = csv::read_table(path, kOrderMetricsHeader);
  std::vector<OrderMetrics> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    RowParser p(path, table, r);
    OrderMetrics m;
    m.order = parse_order(p);
    m.f_mo = p.number(11);
    m.alpha = p.number(12);
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Impacts

std::string impacts_csv(std::span<const ImpactRecord> records) {
  std::string out(kImpactsHeader);
  out.push_back('\n');
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& m = records[k].metrics;
    const auto& i = records[k].impact;
    csv::append_int(out, static_cast<std::int64_t>(k));
    out.push_back(',');
    out.append(m.order.stock).push_back(',');
    out.append(m.order.member);
    append_field(out, m.order.start_ts);
    append_field(out, m.order.end_ts);
    append_field(out, static_cast<std::int64_t>(m.order.first_idx));
    append_field(out, static_cast<std::int64_t>(m.order.last_idx));
    append_field(out, std::int64_t{m.order.epsilon});
    append_field(out, static_cast<std::int64_t>(m.order.n_trades));
    append_field(out, m.f_mo);
    append_field(out, m.alpha);
    append_field(out, m.order.T_seconds);
    append_field(out, m.order.signed_volume);
    append_field(out, i.spread);
    append_field(out, i.r);
    append_field(out, i.R);
    append_field(out, std::int64_t{i.truncated ? 1 : 0});
    out.push_back('\n');
  }
  return out;
}

std::string impact_paths_csv(std::span<const ImpactRecord> records, const ImpactGrid& grid) {
  std::string out(kImpactPathsHeader);
  out.push_back('\n');
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& path = records[k].impact.path;
    for (std::size_t n = 0; n < path.size() && n < grid.size(); ++n) {
      if (std::isnan(path[n])) continue;
      csv::append_int(out, static_cast<std::int64_t>(k));
      append_field(out, static_cast<std::int64_t>(n));
      append_field(out, grid.nodes()[n]);
      append_field(out, path[n]);
      out.push_back('\n');
    }
  }
  return out;
}

std::vector<ImpactRecord> read_impacts(const std::filesystem::path& impacts, const std::filesystem::path& paths,
                                       const ImpactGrid& grid) {
  const auto table = csv::read_table(impacts, kImpactsHeader);
  std::vector<ImpactRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    RowParser p(impacts, table, r);
    if (p.index(0) != r) throw InputError(impacts.string() + ": order ids must be consecutive from 0");
    ImpactRecord rec;
    auto& o = rec.metrics.order;
    o.stock = p.str(1);
    o.member = p.str(2);
    o.start_ts = p.integer(3);
    o.end_ts = p.integer(4);
    o.first_idx = p.index(5);
    o.last_idx = p.index(6);
    o.epsilon = static_cast<int>(p.integer(7));
    o.n_trades = p.index(8);
    rec.metrics.f_mo = p.number(9);
    rec.metrics.alpha = p.number(10);
    o.T_seconds = p.number(11);
    o.signed_volume = p.number(12);
    rec.impact.epsilon = o.epsilon;
    rec.impact.spread = p.number(13);
    rec.impact.r = p.number(14);
    rec.impact.R = p.number(15);
    rec.impact.truncated = p.integer(16) != 0;
    rec.impact.path.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    out.push_back(std::move(rec));
  }
  const auto ptable = csv::read_table(paths, kImpactPathsHeader);
  for (std::size_t r = 0; r < ptable.rows.size(); ++r) {
    RowParser p(paths, ptable, r);
    const auto k = p.index(0);
    const auto n = p.index(1);
    if (k >= out.size() || n >= grid.size()) {
      throw InputError(paths.string() + ":" + std::to_string(ptable.line_numbers[r]) +
                       ": order or node index out of range for the configured grid");
    }
    out[k].impact.path[n] = p.number(3);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curves

std::string impact_curve_csv(const ImpactCurve& curve) {
  std::string out(kImpactCurveHeader);
  out.push_back('\n');
  for (const auto& b : curve.bins) {
    csv::append_double(out, b.lo);
    append_field(out, b.hi);
    append_field(out, b.center);
    append_field(out, b.mean);
    append_field(out, b.se);
    append_field(out, static_cast<std::int64_t>(b.count));
    out.push_back('\n');
  }
  return out;
}

std::string side_curves_csv(const std::optional<ImpactCurve>& buy, const std::optional<ImpactCurve>& sell) {
  std::string out(kSideCurveHeader);
  out.push_back('\n');
  for (const auto& [name, curve] : {std::pair{"buy", &buy}, std::pair{"sell", &sell}}) {
    if (!*curve) continue;
    for (const auto& b : (*curve)->bins) {
      out.append(name);
      append_field(out, b.lo);
      append_field(out, b.hi);
      append_field(out, b.center);
      append_field(out, b.mean);
      append_field(out, b.se);
      append_field(out, static_cast<std::int64_t>(b.count));
      out.push_back('\n');
    }
  }
  return out;
}

std::string profile_csv(std::span<const NamedProfile> curves) {
  std::string out(kProfileHeader);
  out.push_back('\n');
  for (const auto& c : curves) {
    for (const auto& p : c.curve->points) {
      out.append(c.name);
      append_field(out, p.x);
      if (p.count == 0) {
        out.append(",,");
      } else {
        append_field(out, p.mean);
        append_field(out, p.se);
      }
      append_field(out, static_cast<std::int64_t>(p.count));
      out.push_back('\n');
    }
  }
  return out;
}

std::string timing_csv(const Histogram& start, const Histogram& end) {
  std::string out(kTimingHeader);
  out.push_back('\n');
  for (const auto& [name, h] : {std::pair{"start", &start}, std::pair{"end", &end}}) {
    for (std::size_t k = 0; k < h->counts.size(); ++k) {
      out.append(name);
      append_field(out, h->edges[k]);
      append_field(out, h->edges[k + 1]);
      append_field(out, h->probability[k]);
      append_field(out, static_cast<std::int64_t>(h->counts[k]));
      out.push_back('\n');
    }
  }
  return out;
}

std::string impact_vs_T_csv(const IndexComparison& comparison) {
  std::string out(kImpactVsTHeader);
  out.push_back('\n');
  for (const auto& b : comparison.bins) {
    csv::append_double(out, b.lo);
    append_field(out, b.hi);
    append_field(out, b.center);
    append_field(out, b.mean_R);
    append_field(out, b.se_R);
    append_field(out, static_cast<std::int64_t>(b.count));
    append_field(out, b.mean_index_return);
    append_field(out, static_cast<std::int64_t>(b.windows));
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

std::string powerlaw_json(const PowerLawFit& fit, std::string_view exponent_name) {
  const std::string name(exponent_name);
  json j{{"kind", "powerlaw"},
         {"A", number_or_null(fit.A)},
         {name, number_or_null(fit.exponent)},
         {"se_A", number_or_null(fit.se_A)},
         {"se_" + name, number_or_null(fit.se_exponent)},
         {"n_points", fit.n_points},
         {"dropped", fit.dropped},
         {"warnings", fit.warnings}};
  return j.dump();
}

std::string pca_json(const PcaExponents& fits) {
  json j;
  for (const auto& [name, f] : {std::pair{"g1", &fits.g1}, std::pair{"g2", &fits.g2}, std::pair{"g3", &fits.g3}}) {
    j[name] = json{{"kind", "pca"},
                   {"exponent", number_or_null(f->exponent)},
                   {"variance_explained", number_or_null(f->variance_explained)},
                   {"ci_lo", number_or_null(f->ci_lo)},
                   {"ci_hi", number_or_null(f->ci_hi)},
                   {"n_points", f->n_points},
                   {"resamples", f->resamples},
                   {"seed", f->seed}};
  }
  j["pairs"] = json{{"g1", "N ~ |V|^g1"}, {"g2", "T ~ |V|^g2"}, {"g3", "N ~ T^g3"}};
  return j.dump();
}

std::string reversion_json(const Reversion& r) {
  json j{{"R_temp", number_or_null(r.R_temp)},
         {"R_perm", number_or_null(r.R_perm)},
         {"ratio", number_or_null(r.ratio)},
         {"predicted_ratio", number_or_null(r.predicted_ratio)},
         {"perm_nodes", r.perm_nodes}};
  return j.dump();
}

std::string ensemble_json(const EnsembleStats& s) {
  json j{{"n_orders", s.n_orders},
         {"mean_N", mean_se_json(s.mean_N)},
         {"mean_f_mo", mean_se_json(s.mean_f_mo)},
         {"mean_alpha", mean_se_json(s.mean_alpha)},
         {"mean_R", mean_se_json(s.mean_R)},
         {"mean_R_given_fmo_gt", mean_se_json(s.mean_R_given_fmo_gt)},
         {"fmo_threshold", s.fmo_threshold}};
  return j.dump();
}

std::string filter_report_json(const FilterReport& r) {
  json j{{"input", r.input},
         {"failed_duration", r.failed_duration},
         {"failed_min_trades", r.failed_min_trades},
         {"failed_stock_year", r.failed_stock_year},
         {"failed_fmo_band", r.failed_fmo_band},
         {"kept", r.kept}};
  return j.dump();
}

std::string score_json(const DetectionScore& s) {
  auto na = [](const std::optional<double>& v) { return v ? json(*v) : json("NA"); };
  json j{{"n_true", s.n_true},
         {"n_detected", s.n_detected},
         {"matched", s.matched},
         {"precision", na(s.precision)},
         {"recall", na(s.recall)},
         {"boundary_error", na(s.boundary_error)},
         {"start_error", na(s.start_error)},
         {"end_error", na(s.end_error)},
         {"min_jaccard", s.min_jaccard}};
  return j.dump();
}

std::string error_json(std::string_view message) { return json{{"error", std::string(message)}}.dump(); }

std::string json_object(std::span<const std::pair<std::string, std::string>> members) {
  json j = json::object();
  for (const auto& [k, v] : members) j[k] = json::parse(v);
  return j.dump();
}

void merge_json_section(const std::filesystem::path& path, const std::string& section, const std::string& text) {
  json doc = json::object();
  if (std::filesystem::exists(path)) {
    doc = json::parse(csv::read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw InputError("malformed JSON in " + path.string());
  }
  doc[section] = json::parse(text);
  csv::write_file(path, doc.dump(2) + "\n");
}

std::string pretty_json(const std::string& text) { return json::parse(text).dump(2) + "\n"; }

}  // namespace metaimpact
