#include "ssdm/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "ssdm/errors.hpp"

namespace ssdm {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(std::string_view source, std::string_view path, std::string_view what) {
  throw SchemaError(fmt::format("{}: {}: {}", source, path.empty() ? "/" : path, what));
}

struct Reader {
  std::string_view source;

  const json& field(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) schema_fail(source, path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(source, path, fmt::format("missing field \"{}\"", key));
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) schema_fail(source, path, "expected a number");
    return v.get<double>();
  }

  std::size_t count(const json& v, const std::string& path) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) schema_fail(source, path, "expected a nonnegative integer");
    return v.get<std::size_t>();
  }

  Vec vec(const json& v, const std::string& path) const {
    if (!v.is_array()) schema_fail(source, path, "expected an array of numbers");
    Vec out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], fmt::format("{}/{}", path, i)));
    return out;
  }

  std::vector<Vec> vecs(const json& v, const std::string& path) const {
    if (!v.is_array()) schema_fail(source, path, "expected an array of arrays");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vec(v[i], fmt::format("{}/{}", path, i)));
    return out;
  }

  // Array of rows; cols is used when there are no rows, or checked otherwise.
  Mat mat(const json& v, const std::string& path, std::optional<std::size_t> cols) const {
    const auto rows = vecs(v, path);
    std::size_t c = rows.empty() ? cols.value_or(0) : rows.front().size();
    if (cols && c != *cols) schema_fail(source, path, fmt::format("expected {} columns, found {}", *cols, c));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != c) schema_fail(source, fmt::format("{}/{}", path, i), "ragged matrix row");
    }
    return Mat::from_rows(rows, c);
  }

  Mat mat_or_empty(const json& obj, const std::string& path, const char* key, std::size_t rows) const {
    if (!obj.contains(key)) return Mat(rows, 0);
    Mat m = mat(obj[key], path + "/" + key, std::nullopt);
    if (m.rows() != rows) {
      if (m.rows() == 0) return Mat(rows, 0);
      schema_fail(source, path + "/" + key, fmt::format("expected {} rows, found {}", rows, m.rows()));
    }
    return m;
  }
};

json to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const std::vector<Vec>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(v);
  return out;
}

json parse_document(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(fmt::format("{}:{}:{}: malformed JSON ({})", source, line, col, e.what()));
  }
}

void check_header(const Reader& r, const json& doc) {
  const auto& v = r.field(doc, "", "format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    schema_fail(r.source, "/format_version", fmt::format("unsupported version (this build reads {})", kFormatVersion));
  }
  const auto& k = r.field(doc, "", "kind");
  if (!k.is_string()) schema_fail(r.source, "/kind", "expected a string");
}

json inventory_json(const InventoryInstance& inst) {
  json nominal = json::array();
  for (const auto& s : inst.nominal) {
    nominal.push_back({{"demand", s.demand},
                       {"order_cost", s.order_cost},
                       {"holding_cost", s.holding_cost},
                       {"backlog_penalty", s.backlog_penalty},
                       {"revenue", s.revenue}});
  }
  return {{"products", inst.products},  {"stages", inst.stages},       {"z0", inst.z0},
          {"z_lo", to_json(inst.z_lo)}, {"z_hi", to_json(inst.z_hi)},  {"x_lo", to_json(inst.x_lo)},
          {"x_hi", to_json(inst.x_hi)}, {"storage", inst.storage},     {"capacity", inst.capacity},
          {"cost_cap", inst.cost_cap},  {"budget_lo", inst.budget_lo}, {"budget_hi", inst.budget_hi},
          {"total_lo", inst.total_lo},  {"total_hi", inst.total_hi},   {"ratio_lo", inst.ratio_lo},
          {"ratio_hi", inst.ratio_hi},  {"nominal", nominal}};
}

InventoryInstance inventory_from(const Reader& r, const json& j, const std::string& p) {
  InventoryInstance inst;
  inst.products = r.count(r.field(j, p, "products"), p + "/products");
  inst.stages = r.count(r.field(j, p, "stages"), p + "/stages");
  inst.z0 = r.vec(r.field(j, p, "z0"), p + "/z0");
  inst.z_lo = r.vecs(r.field(j, p, "z_lo"), p + "/z_lo");
  inst.z_hi = r.vecs(r.field(j, p, "z_hi"), p + "/z_hi");
  inst.x_lo = r.vecs(r.field(j, p, "x_lo"), p + "/x_lo");
  inst.x_hi = r.vecs(r.field(j, p, "x_hi"), p + "/x_hi");
  inst.storage = r.vec(r.field(j, p, "storage"), p + "/storage");
  inst.capacity = r.number(r.field(j, p, "capacity"), p + "/capacity");
  inst.cost_cap = r.vec(r.field(j, p, "cost_cap"), p + "/cost_cap");
  inst.budget_lo = r.vec(r.field(j, p, "budget_lo"), p + "/budget_lo");
  inst.budget_hi = r.vec(r.field(j, p, "budget_hi"), p + "/budget_hi");
  inst.total_lo = r.number(r.field(j, p, "total_lo"), p + "/total_lo");
  inst.total_hi = r.number(r.field(j, p, "total_hi"), p + "/total_hi");
  inst.ratio_lo = r.number(r.field(j, p, "ratio_lo"), p + "/ratio_lo");
  inst.ratio_hi = r.number(r.field(j, p, "ratio_hi"), p + "/ratio_hi");
  const auto& nom = r.field(j, p, "nominal");
  if (!nom.is_array()) schema_fail(r.source, p + "/nominal", "expected an array of stage objects");
  for (std::size_t t = 0; t < nom.size(); ++t) {
    const std::string q = fmt::format("{}/nominal/{}", p, t);
    StageData s;
    s.demand = r.vec(r.field(nom[t], q, "demand"), q + "/demand");
    s.order_cost = r.vec(r.field(nom[t], q, "order_cost"), q + "/order_cost");
    s.holding_cost = r.vec(r.field(nom[t], q, "holding_cost"), q + "/holding_cost");
    s.backlog_penalty = r.vec(r.field(nom[t], q, "backlog_penalty"), q + "/backlog_penalty");
    s.revenue = r.vec(r.field(nom[t], q, "revenue"), q + "/revenue");
    inst.nominal.push_back(std::move(s));
  }
  try {
    inst.validate();
  } catch (const BadInstance& e) {
    schema_fail(r.source, p, e.what());
  }
  return inst;
}

json polyhedral_json(const PolyhedralInstance& inst) {
  json stages = json::array();
  for (const auto& s : inst.stages) {
    stages.push_back({{"A", to_json(s.base.A)},
                      {"B", to_json(s.base.B)},
                      {"C", to_json(s.base.C)},
                      {"d", s.base.d},
                      {"rhs_shift", to_json(s.rhs_shift)},
                      {"xi_lo", s.xi_lo},
                      {"xi_hi", s.xi_hi}});
  }
  return {{"dim", inst.dim},
          {"Y", {{"A", to_json(inst.Y.A)}, {"C", to_json(inst.Y.C)}, {"d", inst.Y.d}}},
          {"box", {{"lo", inst.box_lo}, {"hi", inst.box_hi}}},
          {"stages", stages}};
}

PolyhedralInstance polyhedral_from(const Reader& r, const json& j, const std::string& p) {
  PolyhedralInstance inst;
  inst.dim = r.count(r.field(j, p, "dim"), p + "/dim");
  const std::string py = p + "/Y";
  const auto& jy = r.field(j, p, "Y");
  inst.Y.d = r.vec(r.field(jy, py, "d"), py + "/d");
  inst.Y.A = r.mat(r.field(jy, py, "A"), py + "/A", inst.dim);
  inst.Y.C = r.mat_or_empty(jy, py, "C", inst.Y.d.size());
  const auto& box = r.field(j, p, "box");
  inst.box_lo = r.vec(r.field(box, p + "/box", "lo"), p + "/box/lo");
  inst.box_hi = r.vec(r.field(box, p + "/box", "hi"), p + "/box/hi");
  const auto& st = r.field(j, p, "stages");
  if (!st.is_array()) schema_fail(r.source, p + "/stages", "expected an array of stage objects");
  for (std::size_t t = 0; t < st.size(); ++t) {
    const std::string q = fmt::format("{}/stages/{}", p, t);
    PolyhedralStage s;
    s.base.d = r.vec(r.field(st[t], q, "d"), q + "/d");
    const std::size_t rows = s.base.d.size();
    s.base.A = r.mat(r.field(st[t], q, "A"), q + "/A", inst.dim);
    s.base.B = r.mat_or_empty(st[t], q, "B", rows);
    s.base.C = r.mat_or_empty(st[t], q, "C", rows);
    s.rhs_shift = r.mat_or_empty(st[t], q, "rhs_shift", rows);
    s.xi_lo = st[t].contains("xi_lo") ? r.vec(st[t]["xi_lo"], q + "/xi_lo") : Vec{};
    s.xi_hi = st[t].contains("xi_hi") ? r.vec(st[t]["xi_hi"], q + "/xi_hi") : Vec{};
    inst.stages.push_back(std::move(s));
  }
  try {
    inst.validate();
  } catch (const Error& e) {
    schema_fail(r.source, p, e.what());
  }
  return inst;
}

}  // namespace

void PolyhedralInstance::validate() const {
  Y.validate();
  if (Y.dim() != dim) throw DimensionMismatch("polyhedral instance: Y has the wrong dimension");
  if (box_lo.size() != dim || box_hi.size() != dim) throw DimensionMismatch("polyhedral instance: box dimension");
  if (stages.empty()) throw BadInstance("polyhedral instance: no stages");
  for (const auto& s : stages) {
    s.base.validate();
    if (s.base.y_dim() != dim) throw DimensionMismatch("polyhedral instance: stage A has the wrong width");
    if (s.rhs_shift.rows() != s.base.rows() && s.rhs_shift.cols() > 0) {
      throw DimensionMismatch("polyhedral instance: rhs_shift rows");
    }
    if (s.xi_lo.size() != s.rhs_shift.cols() || s.xi_hi.size() != s.rhs_shift.cols()) {
      throw DimensionMismatch("polyhedral instance: data range must match rhs_shift columns");
    }
    for (std::size_t i = 0; i < s.xi_lo.size(); ++i) {
      if (!(s.xi_lo[i] <= s.xi_hi[i])) throw BadInstance("polyhedral instance: data range out of order");
    }
  }
}

SemiStochasticModel build_model(const PolyhedralInstance& inst) {
  inst.validate();
  const auto stages = inst.stages;
  auto builder = [stages](std::size_t t, std::span<const double> xi) {
    const auto& s = stages[t - 1];
    StagePolyhedron P = s.base;
    if (s.rhs_shift.cols() > 0) {
      if (xi.size() != s.rhs_shift.cols()) throw DimensionMismatch("polyhedral stage: data length");
      const Vec shift = matvec(s.rhs_shift, xi);
      for (std::size_t i = 0; i < P.d.size(); ++i) P.d[i] += shift[i];
    }
    return P;
  };
  auto sampler = [stages](Rng& rng) {
    Scenario sc;
    for (const auto& s : stages) {
      Vec xi(s.xi_lo.size());
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = rng.uniform(s.xi_lo[i], s.xi_hi[i]);
      sc.stages.push_back(std::move(xi));
    }
    return sc;
  };
  return SemiStochasticModel(inst.dim, stages.size(), inst.Y, builder, sampler, inst.box_lo, inst.box_hi);
}

Instance parse_instance(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  const Reader r{source};
  check_header(r, doc);
  const std::string kind = doc["kind"].get<std::string>();
  Instance inst;
  if (kind == "inventory") {
    inst.data = inventory_from(r, r.field(doc, "", "inventory"), "/inventory");
  } else if (kind == "polyhedral") {
    inst.data = polyhedral_from(r, r.field(doc, "", "polyhedral"), "/polyhedral");
  } else {
    schema_fail(source, "/kind", fmt::format("unknown instance kind \"{}\"", kind));
  }
  if (doc.contains("objective")) inst.objective = r.vec(doc["objective"], "/objective");
  return inst;
}

std::string dump_instance(const Instance& inst) {
  json doc;
  doc["format_version"] = kFormatVersion;
  if (const auto* inv = std::get_if<InventoryInstance>(&inst.data)) {
    doc["kind"] = "inventory";
    doc["inventory"] = inventory_json(*inv);
  } else {
    doc["kind"] = "polyhedral";
    doc["polyhedral"] = polyhedral_json(std::get<PolyhedralInstance>(inst.data));
  }
  if (inst.objective) doc["objective"] = *inst.objective;
  return doc.dump(2) + "\n";
}

Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_file(path), path.string()); }

void save_instance(const std::filesystem::path& path, const Instance& inst) { write_file(path, dump_instance(inst)); }

Decision parse_decision(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  const Reader r{source};
  check_header(r, doc);
  if (doc["kind"] != "decision") schema_fail(source, "/kind", "expected \"decision\"");
  Decision d;
  d.y = r.vec(r.field(doc, "", "y"), "/y");
  const std::size_t n = r.count(r.field(doc, "", "dimension"), "/dimension");
  if (n != d.y.size()) schema_fail(source, "/y", fmt::format("expected {} entries, found {}", n, d.y.size()));
  if (doc.contains("rules")) {
    if (!doc["rules"].is_string()) schema_fail(source, "/rules", "expected a string");
    d.rules = doc["rules"].get<std::string>();
  }
  if (doc.contains("bound") && !doc["bound"].is_null()) d.bound = r.number(doc["bound"], "/bound");
  return d;
}

std::string dump_decision(const Decision& d) {
  json doc{{"format_version", kFormatVersion}, {"kind", "decision"}, {"dimension", d.y.size()},
           {"rules", d.rules},                 {"y", d.y}};
  if (d.bound) doc["bound"] = *d.bound;
  return doc.dump(2) + "\n";
}

Decision load_decision(const std::filesystem::path& path) { return parse_decision(read_file(path), path.string()); }

void save_decision(const std::filesystem::path& path, const Decision& d) { write_file(path, dump_decision(d)); }

std::string format_double(double v) { return fmt::format("{}", v); }

void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& log) {
  out << "s,delta,samples,outcome\n";
  for (const auto& r : log) out << fmt::format("{},{},{},{}\n", r.s, format_double(r.delta), r.samples, r.outcome);
}

void write_step_iterations_csv(std::ostream& out, const std::vector<BisectionStep>& steps) {
  out << "k,s,delta,samples,outcome\n";
  for (const auto& st : steps) {
    for (const auto& r : st.iterations) {
      out << fmt::format("{},{},{},{},{}\n", st.k, r.s, format_double(r.delta), r.samples, r.outcome);
    }
  }
}

void write_bisection_csv(std::ostream& out, const std::vector<BisectionStep>& steps) {
  out << "k,target,outcome,lo,hi,calls\n";
  for (const auto& st : steps) {
    out << fmt::format("{},{},{},{},{},{}\n", st.k, format_double(st.target), to_string(st.outcome),
                       format_double(st.lo), format_double(st.hi), st.calls);
  }
}

void write_nominals_csv(std::ostream& out, const InventoryInstance& inst) {
  out << "t,product,component,value\n";
  for (std::size_t t = 0; t < inst.nominal.size(); ++t) {
    const auto& s = inst.nominal[t];
    const std::pair<const char*, const Vec*> parts[] = {{"demand", &s.demand},
                                                        {"order_cost", &s.order_cost},
                                                        {"holding_cost", &s.holding_cost},
                                                        {"backlog_penalty", &s.backlog_penalty},
                                                        {"revenue", &s.revenue}};
    for (const auto& [name, v] : parts) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        out << fmt::format("{},{},{},{}\n", t + 1, i + 1, name, format_double((*v)[i]));
      }
    }
  }
}

void write_bands_csv(std::ostream& out, const InventoryInstance& inst, std::span<const double> y) {
  const auto L = layout_of(inst);
  if (y.size() != L.dim()) throw DimensionMismatch("write_bands_csv: decision dimension");
  out << "t,product,lower,upper,budget\n";
  for (std::size_t t = 1; t <= L.K; ++t) {
    for (std::size_t i = 0; i < L.d; ++i) {
      out << fmt::format("{},{},{},{},{}\n", t, i + 1, format_double(y[L.lower(t) + i]),
                         format_double(y[L.upper(t) + i]), format_double(y[L.budget(t)]));
    }
  }
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace ssdm
