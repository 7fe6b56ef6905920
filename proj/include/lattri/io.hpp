#pragma once

// Text formats and artifact plumbing: triangulation/constraint/checkpoint
// files, experiment CSVs, model exports, the key-value report, and the typed
// config with its canonical hash. All writers are deterministic; numbers use
// shortest round-trip formatting; files land atomically via temp + rename.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lattri/common.hpp"
#include "lattri/dynamics.hpp"
#include "lattri/exact.hpp"
#include "lattri/experiments.hpp"
#include "lattri/triangulation.hpp"

namespace lattri {

// ---------------------------------------------------------------------------
// low-level helpers

inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw internal_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw input_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(t);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& tok, const char* what) {
  T v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw input_error(std::string("bad ") + what + ": '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// lambda tokens: rational p/q for exact paths, decimal otherwise

struct LambdaValue {
  std::string token;
  double value = 1.0;
  bool rational = false;
  long num = 1, den = 1;  // meaningful when rational
};

inline LambdaValue parse_lambda(const std::string& token) {
  LambdaValue out;
  out.token = token;
  const std::size_t slash = token.find('/');
  if (slash != std::string::npos) {
    out.rational = true;
    out.num = detail::parse_number<long>(token.substr(0, slash), "lambda numerator");
    out.den = detail::parse_number<long>(token.substr(slash + 1), "lambda denominator");
    if (out.num <= 0 || out.den <= 0)
      throw input_error("lambda must be positive: '" + token + "'");
    out.value = static_cast<double>(out.num) / static_cast<double>(out.den);
  } else {
    out.value = detail::parse_number<double>(token, "lambda");
    if (!(out.value > 0.0) || !std::isfinite(out.value))
      throw input_error("lambda must be positive and finite: '" + token + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// triangulation / constraint text files
//   header: <tag> v1 <n> <k> <N> <lambda>
//   body:   one edge per line, "x1 y1 x2 y2", canonical edge order

inline std::string serialize_edges(const std::string& tag, const Region& r,
                                   const std::string& lambda_token,
                                   std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  std::ostringstream out;
  out << tag << " v1 " << r.n << " " << r.k << " " << r.N << " " << lambda_token
      << "\n";
  for (const Edge& e : edges)
    out << e.p.x << " " << e.p.y << " " << e.q.x << " " << e.q.y << "\n";
  return out.str();
}

struct EdgeFile {
  std::string tag;
  std::int32_t n = 0, k = 0, N = 0;
  LambdaValue lambda;
  std::vector<Edge> edges;
};

inline EdgeFile parse_edge_file(const std::string& text, const std::string& want_tag) {
  const std::vector<std::string> lines = detail::content_lines(text);
  if (lines.empty()) throw input_error("empty " + want_tag + " file");
  const auto head = detail::split_ws(lines[0]);
  if (head.size() != 6 || head[0] != want_tag || head[1] != "v1")
    throw input_error("bad header, expected '" + want_tag +
                      " v1 n k N lambda', got '" + lines[0] + "'");
  EdgeFile out;
  out.tag = head[0];
  out.n = detail::parse_number<std::int32_t>(head[2], "n");
  out.k = detail::parse_number<std::int32_t>(head[3], "k");
  out.N = detail::parse_number<std::int32_t>(head[4], "N");
  out.lambda = parse_lambda(head[5]);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto tok = detail::split_ws(lines[i]);
    if (tok.size() != 4)
      throw input_error("bad edge line: '" + lines[i] + "'");
    out.edges.push_back(
        make_edge(make_point(detail::parse_number<std::int32_t>(tok[0], "x1"),
                             detail::parse_number<std::int32_t>(tok[1], "y1")),
                  make_point(detail::parse_number<std::int32_t>(tok[2], "x2"),
                             detail::parse_number<std::int32_t>(tok[3], "y2"))));
  }
  return out;
}

inline std::string save_triangulation(const Triangulation& t,
                                      const std::string& lambda_token = "1") {
  return serialize_edges("lattice-tri", t.region(), lambda_token, t.edges_by_mid());
}

// Rebuilds the triangulation; with no constraint set given the header's region
// is used unconstrained. Full validation runs and names the first violation.
inline Triangulation load_triangulation(const std::string& text,
                                        std::shared_ptr<const ConstraintSet> cs = nullptr) {
  const EdgeFile f = parse_edge_file(text, "lattice-tri");
  if (!cs) cs = make_constraints(make_region(f.n, f.k, f.N));
  const Region& r = *cs->region;
  if (r.n != f.n || r.k != f.k || r.N != f.N)
    throw input_error("triangulation header does not match the constraint region");
  if (static_cast<std::int32_t>(f.edges.size()) != r.midpoint_count)
    throw input_error("edge count " + std::to_string(f.edges.size()) +
                      " != midpoint count " + std::to_string(r.midpoint_count));
  // file order is canonical edge order; the constructor wants mid-id slots
  std::vector<Edge> by_mid(f.edges.size());
  std::vector<bool> seen(f.edges.size(), false);
  for (const Edge& e : f.edges) {
    if (!is_primitive(e.p, e.q))
      throw input_error("not primitive: " + to_string(e));
    if (!r.contains_point(e.p) || !r.contains_point(e.q))
      throw input_error("outside region: " + to_string(e));
    const auto id = static_cast<std::size_t>(r.mid_id(midpoint_of(e)));
    if (seen[id]) throw input_error("duplicate midpoint: " + to_string(e));
    seen[id] = true;
    by_mid[id] = e;
  }
  ValidationReport rep;
  auto t = triangulation_from_edges(cs, std::move(by_mid), &rep);
  if (!t) throw input_error("invalid triangulation: " + rep.violations.front());
  return std::move(*t);
}

inline std::string save_constraints(const ConstraintSet& cs,
                                    const std::string& lambda_token = "1") {
  return serialize_edges("constraints", *cs.region, lambda_token, cs.edges);
}

inline std::shared_ptr<const ConstraintSet> load_constraints(const std::string& text) {
  const EdgeFile f = parse_edge_file(text, "constraints");
  return make_constraints(make_region(f.n, f.k, f.N), f.edges);
}

// ---------------------------------------------------------------------------
// trajectory checkpoints: rng counters + the current state

inline std::string save_checkpoint(const ChainState& st,
                                   const std::string& lambda_token = "1") {
  std::ostringstream out;
  out << "checkpoint v1\n"
      << "step " << st.step << "\n"
      << "seed " << st.seed << "\n"
      << "stream " << st.stream << "\n"
      << save_triangulation(st.t, lambda_token);
  return out.str();
}

inline ChainState load_checkpoint(const std::string& text,
                                  std::shared_ptr<const ConstraintSet> cs = nullptr) {
  const std::vector<std::string> lines = detail::content_lines(text);
  if (lines.size() < 5 || detail::split_ws(lines[0]) !=
                              std::vector<std::string>{"checkpoint", "v1"})
    throw input_error("bad checkpoint header");
  const auto field = [&lines](std::size_t i, const char* name) {
    const auto tok = detail::split_ws(lines[i]);
    if (tok.size() != 2 || tok[0] != name)
      throw input_error(std::string("bad checkpoint field, expected '") + name +
                        "', got '" + lines[i] + "'");
    return detail::parse_number<std::uint64_t>(tok[1], name);
  };
  ChainState st{Triangulation{}, field(1, "step"), field(2, "seed"),
                field(3, "stream")};
  std::ostringstream rest;
  for (std::size_t i = 4; i < lines.size(); ++i) rest << lines[i] << "\n";
  st.t = load_triangulation(rest.str(), std::move(cs));
  return st;
}

// ---------------------------------------------------------------------------
// CSV artifacts; every file starts with the provenance comment line

inline std::string artifact_header(std::uint64_t seed, std::uint64_t config_hash) {
  return "# " + std::string(kFormatTag) + " " + std::string(kVersion) + " seed=" +
         std::to_string(seed) + " config-hash=" + hex64(config_hash) + "\n";
}

inline std::string edge_tail_csv(const EdgeTailResult& res, std::uint64_t seed,
                                 std::uint64_t config_hash) {
  std::ostringstream out;
  out << artifact_header(seed, config_hash)
      << "midpoint_u,midpoint_v,ell,freq,ci_half,replicas\n";
  for (const EdgeTailRow& row : res.rows)
    out << row.mid.u << "," << row.mid.v << "," << row.ell << ","
        << fmt_double(row.freq) << "," << fmt_double(row.ci_half) << ","
        << row.replicas << "\n";
  return out.str();
}

inline std::string crossings_csv(const CrossingResult& res, std::uint64_t seed,
                                 std::uint64_t config_hash) {
  std::ostringstream out;
  out << artifact_header(seed, config_hash) << "sample,count\n";
  for (std::size_t i = 0; i < res.counts.size(); ++i)
    out << i << "," << res.counts[i] << "\n";
  return out.str();
}

inline std::string scaling_csv(const ScalingResult& res, std::uint64_t seed,
                               std::uint64_t config_hash) {
  std::ostringstream out;
  out << artifact_header(seed, config_hash) << "n,k,lambda,method,tmix,lo,hi\n";
  for (const ScalingRow& row : res.rows)
    out << row.n << "," << row.k << "," << fmt_double(row.lambda) << ","
        << row.method << "," << fmt_double(row.tmix) << "," << fmt_double(row.lo)
        << "," << fmt_double(row.hi) << "\n";
  return out.str();
}

inline std::string states_csv(const ExactModel& m, std::uint64_t seed,
                              std::uint64_t config_hash) {
  std::ostringstream out;
  out << artifact_header(seed, config_hash) << "state,total_length,pi\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    out << i << "," << m.lengths[i] << "," << fmt_double(m.pi[i]) << "\n";
  return out.str();
}

// coordinate-format Matrix Market export of the transition matrix
inline std::string matrix_market(const ExactModel& m) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real general\n";
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    nnz += m.rows[i].size();
    if (m.diag[i] != 0.0) ++nnz;
  }
  out << m.size() << " " << m.size() << " " << nnz << "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool diag_done = false;
    for (const auto& [j, p] : m.rows[i]) {
      if (!diag_done && static_cast<std::size_t>(j) > i && m.diag[i] != 0.0) {
        out << i + 1 << " " << i + 1 << " " << fmt_double(m.diag[i]) << "\n";
        diag_done = true;
      }
      out << i + 1 << " " << j + 1 << " " << fmt_double(p) << "\n";
    }
    if (!diag_done && m.diag[i] != 0.0)
      out << i + 1 << " " << i + 1 << " " << fmt_double(m.diag[i]) << "\n";
  }
  return out.str();
}

inline std::string report_text(const std::vector<std::pair<std::string, std::string>>& kv,
                               std::uint64_t seed, std::uint64_t config_hash) {
  std::ostringstream out;
  out << artifact_header(seed, config_hash);
  for (const auto& [key, value] : kv) out << key << "=" << value << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// config: INI-style sections flattened to dotted keys, fixed vocabulary,
// canonical serialization and FNV-1a hash

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "region.n",
      "region.k",
      "region.enlarge",
      "chain.lambda",
      "chain.seed",
      "chain.steps",
      "chain.thin",
      "experiment.replicas",
      "experiment.burn_in",
      "experiment.window",
      "experiment.good_c",
      "experiment.delta",
      "experiment.thinning",
      "experiment.m0",
      "experiment.slab_lo",
      "experiment.slab_hi",
      "experiment.ell_min",
      "experiment.ell_max",
      "experiment.samples",
      "experiment.sizes",
      "experiment.method",
      "experiment.pairs",
      "experiment.widths",
      "limits.state_cap",
      "limits.horizon",
      "mixing.eps",
      "render.scale",
      "render.ground_overlay",
      "render.highlights",
      "output.path",
  };
  return keys;
}

struct Config {
  std::map<std::string, std::string> values;

  std::optional<std::string> find(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
  std::string get(const std::string& key, const std::string& fallback) const {
    return find(key).value_or(fallback);
  }
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    const auto v = find(key);
    if (!v) return fallback;
    return detail::parse_number<std::int64_t>(*v, key.c_str());
  }
  double get_double(const std::string& key, double fallback) const {
    const auto v = find(key);
    if (!v) return fallback;
    return detail::parse_number<double>(*v, key.c_str());
  }
  bool get_bool(const std::string& key, bool fallback) const {
    const auto v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw input_error("bad boolean for " + key + ": '" + *v + "'");
  }

  void set(const std::string& key, const std::string& value) {
    if (known_config_keys().count(key) == 0)
      throw input_error("unknown config key: '" + key + "'");
    values[key] = value;
  }

  // canonical form: sorted "key=value" lines, no sections
  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : values) out << k << "=" << v << "\n";
    return out.str();
  }
  // Covers everything that can influence numeric artifact content; where the
  // artifacts land is not part of it, so runs into different directories
  // produce byte-identical files.
  std::uint64_t hash() const {
    std::ostringstream out;
    for (const auto& [k, v] : values)
      if (k != "output.path") out << k << "=" << v << "\n";
    return fnv1a64(out.str());
  }
};

inline Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw input_error("bad section header on line " + std::to_string(lineno));
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw input_error("expected key=value on line " + std::to_string(lineno));
    std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw input_error("empty key on line " + std::to_string(lineno));
    if (!section.empty() && key.find('.') == std::string::npos)
      key = section + "." + key;
    if (cfg.values.count(key))
      throw input_error("duplicate config key: '" + key + "'");
    cfg.set(key, value);
  }
  return cfg;
}

}  // namespace lattri
