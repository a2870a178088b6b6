#include "lgcf/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lgcf/errors.hpp"

namespace lgcf {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    out << (j ? " " : "") << fmt(values[j]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const char* tag, const Matrix& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) write_values(out, m.row(r));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-empty line split into whitespace tokens.
  std::vector<std::string> line() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_no_;
      std::istringstream ss(text);
      std::vector<std::string> toks;
      for (std::string t; ss >> t;) toks.push_back(t);
      if (!toks.empty()) return toks;
    }
    fail("unexpected end of checkpoint");
  }

  std::vector<std::string> expect(const std::string& tag, std::size_t fields) {
    auto toks = line();
    if (toks.front() != tag || toks.size() != fields + 1) {
      fail("expected '" + tag + "' with " + std::to_string(fields) + " fields");
    }
    return toks;
  }

  std::vector<double> values(std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    if (count == 0) return out;  // written as a blank line, which line() skips
    for (const auto& t : line()) out.push_back(number(t));
    if (out.size() != count) fail("expected " + std::to_string(count) + " values");
    return out;
  }

  Matrix matrix(const std::string& tag) {
    const auto head = expect(tag, 2);
    const auto rows = count(head[1]);
    const auto cols = count(head[2]);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = values(cols);
      std::copy(row.begin(), row.end(), m.row(r).begin());
    }
    return m;
  }

  double number(const std::string& t) const {
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail("bad number '" + t + "'");
    return v;
  }

  std::size_t count(const std::string& t) const {
    std::size_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail("bad count '" + t + "'");
    return v;
  }

  bool flag(const std::string& t) const {
    if (t == "1") return true;
    if (t == "0") return false;
    fail("bad flag '" + t + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_no_, msg); }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const Model& m = ckpt.model;
  const auto& c = m.config;
  out << "lgcf-checkpoint " << kCheckpointVersion << '\n';
  out << "kind " << to_string(m.kind) << '\n';
  out << "seed " << m.seed << '\n';
  out << "lambda " << fmt(m.lambda) << '\n';
  out << "gnn_shape " << c.gnn.feature_width << ' ' << c.gnn.hidden << ' ' << c.gnn.layers << ' '
      << to_string(c.gnn.activation) << '\n';
  out << "walk " << fmt(c.walk.restart_prob) << ' ' << c.walk.walk_len << ' ' << c.walk.max_nodes
      << ' ' << (c.walk.remove_target_edge ? 1 : 0) << '\n';
  out << "embedding " << c.embedding_dim << ' ' << c.lightgcn_layers << '\n';

  out << "gnn " << m.gnn.weights.size() << '\n';
  for (const auto& w : m.gnn.weights) write_matrix(out, "weight", w);
  out << "scoring " << m.gnn.scoring.size() << '\n';
  write_values(out, m.gnn.scoring);

  write_matrix(out, "users", m.embeddings.users);
  write_matrix(out, "items", m.embeddings.items);
  out << "joint " << m.joint.size() << '\n';
  write_values(out, m.joint);

  out << "optimizers " << ckpt.optimizers.size() << '\n';
  for (const auto& a : ckpt.optimizers) {
    out << "adam " << fmt(a.config.lr) << ' ' << fmt(a.config.beta1) << ' ' << fmt(a.config.beta2)
        << ' ' << fmt(a.config.eps) << ' ' << a.step << ' ' << a.first.size() << '\n';
    for (std::size_t b = 0; b < a.first.size(); ++b) {
      out << "block " << a.first[b].size() << '\n';
      write_values(out, a.first[b]);
      write_values(out, a.second[b]);
    }
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  const auto head = r.expect("lgcf-checkpoint", 1);
  if (r.count(head[1]) != static_cast<std::size_t>(kCheckpointVersion)) {
    r.fail("unsupported checkpoint version " + head[1]);
  }
  Checkpoint ckpt;
  Model& m = ckpt.model;
  auto& c = m.config;
  try {
    m.kind = parse_model_kind(r.expect("kind", 1)[1]);
  } catch (const DomainError& e) {
    r.fail(e.what());
  }
  {
    const auto t = r.expect("seed", 1);
    std::uint64_t seed = 0;
    const auto res = std::from_chars(t[1].data(), t[1].data() + t[1].size(), seed);
    if (res.ec != std::errc()) r.fail("bad seed");
    m.seed = seed;
  }
  m.lambda = r.number(r.expect("lambda", 1)[1]);
  {
    const auto t = r.expect("gnn_shape", 4);
    c.gnn.feature_width = r.count(t[1]);
    c.gnn.hidden = r.count(t[2]);
    c.gnn.layers = r.count(t[3]);
    try {
      c.gnn.activation = parse_activation(t[4]);
    } catch (const DomainError& e) {
      r.fail(e.what());
    }
  }
  {
    const auto t = r.expect("walk", 4);
    c.walk.restart_prob = r.number(t[1]);
    c.walk.walk_len = r.count(t[2]);
    c.walk.max_nodes = r.count(t[3]);
    c.walk.remove_target_edge = r.flag(t[4]);
  }
  {
    const auto t = r.expect("embedding", 2);
    c.embedding_dim = r.count(t[1]);
    c.lightgcn_layers = r.count(t[2]);
  }

  const auto layers = r.count(r.expect("gnn", 1)[1]);
  m.gnn.activation = c.gnn.activation;
  for (std::size_t l = 0; l < layers; ++l) m.gnn.weights.push_back(r.matrix("weight"));
  m.gnn.scoring = r.values(r.count(r.expect("scoring", 1)[1]));

  m.embeddings.users = r.matrix("users");
  m.embeddings.items = r.matrix("items");
  m.joint = r.values(r.count(r.expect("joint", 1)[1]));

  const auto n_opt = r.count(r.expect("optimizers", 1)[1]);
  for (std::size_t o = 0; o < n_opt; ++o) {
    const auto t = r.expect("adam", 6);
    AdamState a;
    a.config.lr = r.number(t[1]);
    a.config.beta1 = r.number(t[2]);
    a.config.beta2 = r.number(t[3]);
    a.config.eps = r.number(t[4]);
    a.step = r.count(t[5]);
    const auto blocks = r.count(t[6]);
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto len = r.count(r.expect("block", 1)[1]);
      a.first.push_back(r.values(len));
      a.second.push_back(r.values(len));
    }
    ckpt.optimizers.push_back(std::move(a));
  }
  r.expect("end", 0);
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  write_checkpoint(out, ckpt);
  if (!out) throw DomainError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  return read_checkpoint(in);
}

}  // namespace lgcf
