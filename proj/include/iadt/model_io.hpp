#ifndef IADT_MODEL_IO_HPP
#define IADT_MODEL_IO_HPP

// Versioned text model format. Every parameter is written as a C99
// hexadecimal float literal so load(save(m)) is bit-exact.
//
//   iadt-model v1
//   <d> <h> <m>
//   layer <name> <out> <in> <activation>
//   <out lines of <in> weights>
//   bias <out values>
//   ... (attention enc1 enc2 dec1 dec2 clf)
//   stats <d>
//   means <d values>
//   sds <d values>
//   end

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "iadt/data.hpp"
#include "iadt/errors.hpp"
#include "iadt/network.hpp"

namespace iadt {

/// Network parameters plus the standardizer they were trained behind.
struct TrainedModel {
  ModelParams params;
  FeatureStats stats;
  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

inline constexpr std::string_view kModelMagic = "iadt-model v1";

namespace detail {

inline std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline void write_values(std::ostream& out, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << hex(v[i]);
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::istringstream next_line(const char* expecting) {
    std::string line;
    if (!std::getline(in_, line)) fail(std::string("unexpected end of file, expected ") + expecting);
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return std::istringstream(line);
  }

  double number(std::istringstream& s) {
    std::string tok;
    if (!(s >> tok)) fail("missing value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) {
      fail("bad number '" + tok + "'");
    }
    return v;
  }

  Vector values(std::istringstream& s, std::size_t n) {
    Vector v(n);
    for (double& x : v) x = number(s);
    std::string extra;
    if (s >> extra) fail("trailing token '" + extra + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("model line " + std::to_string(line_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace detail

inline void write_model(std::ostream& out, const TrainedModel& m) {
  validate(m.params);
  const ModelParams& p = m.params;
  out << kModelMagic << '\n'
      << p.input_dim() << ' ' << p.hidden_dim() << ' ' << p.latent_dim() << '\n';
  for (std::size_t i = 0; i < kParamLayers.size(); ++i) {
    const DenseLayer& l = p.*kParamLayers[i];
    out << "layer " << kLayerNames[i] << ' ' << l.out() << ' ' << l.in() << ' '
        << to_string(l.activation) << '\n';
    for (std::size_t r = 0; r < l.out(); ++r) {
      detail::write_values(out, l.weights.row(r));
      out << '\n';
    }
    out << "bias ";
    detail::write_values(out, l.biases);
    out << '\n';
  }
  out << "stats " << m.stats.size() << '\n' << "means ";
  detail::write_values(out, m.stats.means);
  out << "\nsds ";
  detail::write_values(out, m.stats.sds);
  out << "\nend\n";
}

inline TrainedModel read_model(std::istream& in) {
  detail::ModelReader rd(in);
  {
    auto s = rd.next_line("header");
    if (s.str() != kModelMagic) rd.fail("not an iadt-model v1 file");
  }
  std::size_t d = 0, h = 0, m = 0;
  {
    auto s = rd.next_line("dimensions");
    if (!(s >> d >> h >> m) || d == 0 || h == 0 || m == 0) rd.fail("bad dimension line");
  }
  static constexpr std::array<Activation, 6> kActs = {Activation::softmax, Activation::relu,
                                                      Activation::linear,  Activation::relu,
                                                      Activation::linear,  Activation::sigmoid};
  const std::array<std::pair<std::size_t, std::size_t>, 6> shapes = {
      std::pair{d, d}, {h, d}, {m, h}, {h, m}, {d, h}, {1, m}};
  TrainedModel out;
  for (std::size_t i = 0; i < kParamLayers.size(); ++i) {
    auto s = rd.next_line("layer header");
    std::string kw, name, act;
    std::size_t rows = 0, cols = 0;
    if (!(s >> kw >> name >> rows >> cols >> act) || kw != "layer") rd.fail("bad layer header");
    if (name != kLayerNames[i]) rd.fail("expected layer '" + std::string(kLayerNames[i]) + "'");
    if (rows != shapes[i].first || cols != shapes[i].second) rd.fail("layer shape mismatch");
    if (act != to_string(kActs[i])) rd.fail("activation mismatch for layer " + name);
    DenseLayer l{Matrix(rows, cols), Vector(), kActs[i]};
    for (std::size_t r = 0; r < rows; ++r) {
      auto line = rd.next_line("weights");
      Vector v = rd.values(line, cols);
      std::copy(v.begin(), v.end(), l.weights.row(r).begin());
    }
    auto b = rd.next_line("bias");
    std::string bkw;
    if (!(b >> bkw) || bkw != "bias") rd.fail("expected bias line");
    l.biases = rd.values(b, rows);
    out.params.*kParamLayers[i] = std::move(l);
  }
  {
    auto s = rd.next_line("stats");
    std::string kw;
    std::size_t n = 0;
    if (!(s >> kw >> n) || kw != "stats" || n != d) rd.fail("bad stats header");
    auto mline = rd.next_line("means");
    if (!(mline >> kw) || kw != "means") rd.fail("expected means line");
    out.stats.means = rd.values(mline, d);
    auto sline = rd.next_line("sds");
    if (!(sline >> kw) || kw != "sds") rd.fail("expected sds line");
    out.stats.sds = rd.values(sline, d);
    for (double v : out.stats.sds)
      if (!(v > 0.0)) rd.fail("standard deviations must be positive");
  }
  {
    auto s = rd.next_line("end");
    if (s.str() != "end") rd.fail("expected 'end'");
  }
  return out;
}

inline void save_model(const std::string& path, const TrainedModel& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_model(out, m);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace iadt

#endif  // IADT_MODEL_IO_HPP
