#include "lorentz_ot/io.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "lorentz_ot/errors.hpp"

namespace lorentz_ot::io {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line with comments stripped; false at end of input.
  bool next(std::string& line) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++number_;
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      const auto first = raw.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = raw.find_last_not_of(" \t\r");
      line = raw.substr(first, last - first + 1);
      return true;
    }
    return false;
  }

  std::string expect(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of input, expected ") + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream out;
    out << "line " << number_ << ": " << msg;
    throw ParseError(out.str());
  }

  std::vector<double> numbers(const std::string& line) const {
    std::vector<double> out;
    std::istringstream words(line);
    std::string word;
    while (words >> word) {
      char* end = nullptr;
      const double v = std::strtod(word.c_str(), &end);
      if (end == word.c_str() || *end != '\0') fail("not a number: '" + word + "'");
      out.push_back(v);
    }
    return out;
  }

  long integer(const std::string& text) const {
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0') fail("not an integer: '" + text + "'");
    return v;
  }

  // "key=value" or "key value".
  std::string value_of(const std::string& line, const std::string& key) const {
    if (line.rfind(key, 0) != 0) fail("expected '" + key + "'");
    std::string rest = line.substr(key.size());
    const auto first = rest.find_first_not_of(" \t=");
    if (first == std::string::npos) fail("missing value for '" + key + "'");
    return rest.substr(first);
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

std::ostream& precise(std::ostream& out) {
  out.precision(17);
  return out;
}

void write_event_row(std::ostream& out, const Event& e, double weight) {
  out << e.t;
  for (Index k = 0; k < e.x.size(); ++k) out << ' ' << e.x(k);
  out << ' ' << weight << '\n';
}

DiscreteMeasure read_rows(LineReader& reader, long count, long dim) {
  std::vector<Event> points;
  std::vector<double> weights;
  std::string line;
  for (long k = 0; k < count || count < 0; ++k) {
    if (count < 0) {
      if (!reader.next(line)) break;
    } else {
      line = reader.expect("measure row");
    }
    const std::vector<double> v = reader.numbers(line);
    if (static_cast<long>(v.size()) != dim + 1) reader.fail("expected t, spatial coordinates and a weight");
    Eigen::VectorXd x(dim - 1);
    for (long i = 1; i < dim; ++i) x(i - 1) = v[static_cast<std::size_t>(i)];
    points.emplace_back(v.front(), std::move(x));
    weights.push_back(v.back());
  }
  try {
    return make_measure(std::move(points), std::move(weights));
  } catch (const InvalidInput& e) {
    reader.fail(e.what());
  }
}

std::shared_ptr<const SpacetimeModel> read_model_block(LineReader& reader, bool until_end) {
  const std::string kind = reader.value_of(reader.expect("kind"), "kind");
  const long dim = reader.integer(reader.value_of(reader.expect("dim"), "dim"));
  if (dim < 2) reader.fail("dim must be at least 2");
  std::vector<std::pair<double, double>> table;
  std::string line;
  while (until_end ? (line = reader.expect("end"), line != "end") : reader.next(line)) {
    const std::vector<double> v = reader.numbers(line);
    if (v.size() != 2) reader.fail("expected a 't a' table row");
    table.emplace_back(v[0], v[1]);
  }
  try {
    if (kind == "minkowski") {
      if (!table.empty()) reader.fail("minkowski model takes no table");
      return make_minkowski(dim - 1);
    }
    if (kind == "rw") return make_robertson_walker(dim - 1, std::move(table));
  } catch (const InvalidInput& e) {
    reader.fail(e.what());
  }
  reader.fail("unknown model kind '" + kind + "'");
}

template <typename Parse>
auto open_and(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse(in);
}

}  // namespace

std::shared_ptr<const SpacetimeModel> parse_model(std::istream& in) {
  LineReader reader(in);
  return read_model_block(reader, false);
}

void write_model(std::ostream& out, const SpacetimeModel& model) {
  precise(out) << "kind=" << to_string(model.kind()) << '\n' << "dim=" << model.dim() << '\n';
  if (const auto* rw = dynamic_cast<const RobertsonWalkerModel*>(&model))
    for (const auto& [t, a] : rw->table()) out << t << ' ' << a << '\n';
}

DiscreteMeasure parse_measure(std::istream& in) {
  LineReader reader(in);
  const long dim = reader.integer(reader.value_of(reader.expect("dim"), "dim"));
  if (dim < 2) reader.fail("dim must be at least 2");
  return read_rows(reader, -1, dim);
}

void write_measure(std::ostream& out, const DiscreteMeasure& m) {
  precise(out) << "dim=" << 1 + m.spatial_dim() << '\n';
  for (Index i = 0; i < m.size(); ++i) write_event_row(out, m.points()[static_cast<std::size_t>(i)], m.weights()(i));
}

PlanFile parse_plan(std::istream& in) {
  LineReader reader(in);
  PlanFile file;
  if (reader.expect("model") != "model") reader.fail("expected 'model'");
  file.model = read_model_block(reader, true);
  const long dim = file.model->dim();
  const long m = reader.integer(reader.value_of(reader.expect("sources"), "sources"));
  file.mu = read_rows(reader, m, dim);
  const long n = reader.integer(reader.value_of(reader.expect("targets"), "targets"));
  file.nu = read_rows(reader, n, dim);

  TransportPlan& plan = file.plan;
  plan.denominator = reader.integer(reader.value_of(reader.expect("denominator"), "denominator"));
  if (plan.denominator < 1) reader.fail("denominator must be positive");
  const long k = reader.integer(reader.value_of(reader.expect("coupling"), "coupling"));
  plan.coupling = Eigen::MatrixXd::Zero(m, n);
  plan.counts = CountMatrix::Zero(m, n);
  for (long e = 0; e < k; ++e) {
    const std::vector<double> v = reader.numbers(reader.expect("coupling entry"));
    if (v.size() != 3) reader.fail("expected 'i j mass'");
    const auto i = static_cast<Index>(v[0]) - 1, j = static_cast<Index>(v[1]) - 1;
    if (i < 0 || i >= m || j < 0 || j >= n || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
      reader.fail("coupling index out of range");
    plan.coupling(i, j) = v[2];
    plan.counts(i, j) = std::llround(v[2] * static_cast<double>(plan.denominator));
  }
  auto vector_block = [&](const char* key) {
    const long len = reader.integer(reader.value_of(reader.expect(key), key));
    Eigen::VectorXd out(len);
    for (long i = 0; i < len; ++i) {
      const std::vector<double> v = reader.numbers(reader.expect(key));
      if (v.size() != 1) reader.fail("expected one value per line");
      out(i) = v[0];
    }
    return out;
  };
  plan.psi = vector_block("psi");
  plan.phi = vector_block("phi");
  auto scalar = [&](const char* key) {
    const std::vector<double> v = reader.numbers(reader.value_of(reader.expect(key), key));
    if (v.size() != 1) reader.fail(std::string("expected one value for ") + key);
    return v[0];
  };
  plan.primal_cost = scalar("primal");
  plan.dual_value = scalar("dual");
  return file;
}

void write_plan(std::ostream& out, const PlanFile& file) {
  precise(out) << "model\n";
  write_model(out, *file.model);
  out << "end\n";
  out << "sources " << file.mu.size() << '\n';
  for (Index i = 0; i < file.mu.size(); ++i) write_event_row(out, file.mu.points()[static_cast<std::size_t>(i)], file.mu.weights()(i));
  out << "targets " << file.nu.size() << '\n';
  for (Index j = 0; j < file.nu.size(); ++j) write_event_row(out, file.nu.points()[static_cast<std::size_t>(j)], file.nu.weights()(j));
  const TransportPlan& plan = file.plan;
  out << "denominator " << plan.denominator << '\n';
  const auto support = plan.support();
  out << "coupling " << support.size() << '\n';
  for (const auto& [i, j] : support) out << i + 1 << ' ' << j + 1 << ' ' << plan.coupling(i, j) << '\n';
  out << "psi " << plan.psi.size() << '\n';
  for (Index i = 0; i < plan.psi.size(); ++i) out << plan.psi(i) << '\n';
  out << "phi " << plan.phi.size() << '\n';
  for (Index j = 0; j < plan.phi.size(); ++j) out << plan.phi(j) << '\n';
  out << "primal " << plan.primal_cost << '\n' << "dual " << plan.dual_value << '\n';
}

void write_trajectories(std::ostream& out, const DynamicalCoupling& dc) {
  precise(out);
  for (std::size_t k = 0; k < dc.paths.size(); ++k)
    for (const GeodesicSample& sample : dc.paths[k].path.samples) {
      out << k + 1 << ' ' << sample.s << ' ' << sample.event.t;
      for (Index d = 0; d < sample.event.x.size(); ++d) out << ' ' << sample.event.x(d);
      out << ' ' << dc.paths[k].mass << '\n';
    }
}

void write_map(std::ostream& out, std::span<const Index> map) {
  for (std::size_t i = 0; i < map.size(); ++i) out << i + 1 << " -> " << map[i] + 1 << '\n';
}

std::shared_ptr<const SpacetimeModel> read_model(const std::filesystem::path& path) {
  return open_and(path, [](std::istream& in) { return parse_model(in); });
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
  return open_and(path, [](std::istream& in) { return parse_measure(in); });
}

PlanFile read_plan(const std::filesystem::path& path) {
  return open_and(path, [](std::istream& in) { return parse_plan(in); });
}

}  // namespace lorentz_ot::io
