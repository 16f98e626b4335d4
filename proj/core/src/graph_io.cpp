#include "layergraph/graph_io.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "layergraph/errors.hpp"

namespace layergraph {

namespace {

constexpr char kTextMagic[] = "LGDUMP";
constexpr char kBinMagic[4] = {'L', 'G', 'D', 'B'};
constexpr char kBinTrailer[4] = {'L', 'G', 'D', 'E'};
constexpr std::uint32_t kVersion = 1;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// ---- binary primitives -------------------------------------------------

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 8);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

void put_str(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("binary dump: truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError("binary dump: truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& is) {
  const std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string get_str(std::istream& is) {
  const std::uint32_t len = get_u32(is);
  if (len > (1u << 20)) throw FormatError("binary dump: implausible string length");
  std::string s(len, '\0');
  if (len > 0 && !is.read(s.data(), len)) throw FormatError("binary dump: truncated");
  return s;
}

OverlayGraph build(std::size_t n, std::vector<Layer> layers, SeedRecord rec, std::vector<NodeId> orig) {
  try {
    return OverlayGraph(n, std::move(layers), std::move(rec), std::move(orig));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("dump: inconsistent graph: ") + e.what());
  }
}

GraphDump read_binary(std::istream& is) {
  const std::uint32_t version = get_u32(is);
  if (version != kVersion) throw FormatError("binary dump: unsupported version " + std::to_string(version));
  const std::uint64_t n = get_u64(is);
  const std::uint64_t m = get_u64(is);
  SeedRecord rec;
  rec.master = get_u64(is);
  rec.replicate = get_u64(is);
  const std::uint64_t hash = get_u64(is);
  rec.generator = get_str(is);
  rec.percolation = get_str(is);
  std::vector<NodeId> orig;
  const std::uint32_t has_orig = get_u32(is);
  if (has_orig > 1) throw FormatError("binary dump: bad original-id flag");
  if (has_orig == 1) {
    orig.resize(n);
    for (auto& v : orig) v = get_u32(is);
  }
  std::vector<Layer> layers;
  layers.reserve(m);
  for (std::uint64_t k = 0; k < m; ++k) {
    Layer L;
    const std::uint64_t x = get_u64(is);
    L.type.strength = get_f64(is);
    const std::uint64_t e = get_u64(is);
    if (x > n || e > x * (x > 0 ? x - 1 : 0) / 2) throw FormatError("binary dump: bad layer header");
    L.type.size = x;
    L.nodes.resize(x);
    for (auto& v : L.nodes) v = get_u32(is);
    L.edges.reserve(e);
    for (std::uint64_t i = 0; i < e; ++i) {
      const NodeId u = get_u32(is);
      const NodeId v = get_u32(is);
      L.edges.emplace_back(u, v);
    }
    layers.push_back(std::move(L));
  }
  char trailer[4];
  if (!is.read(trailer, 4) || std::memcmp(trailer, kBinTrailer, 4) != 0) {
    throw FormatError("binary dump: missing trailer");
  }
  return {build(n, std::move(layers), std::move(rec), std::move(orig)), hash};
}

// ---- text ----------------------------------------------------------------

struct LineReader {
  std::istream& is;
  std::size_t line_no = 0;

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(is, line)) {
      throw FormatError("text dump: unexpected end of input, expected " + std::string(what));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("text dump line " + std::to_string(line_no) + ": " + msg);
  }

  // "key rest" -> rest, checking the key.
  std::string keyed(const char* key) {
    const std::string line = next(key);
    const std::size_t klen = std::strlen(key);
    if (line.compare(0, klen, key) != 0 || (line.size() > klen && line[klen] != ' ')) {
      fail(std::string("expected '") + key + "'");
    }
    return line.size() > klen ? line.substr(klen + 1) : std::string();
  }
};

template <class T>
T parse_number(LineReader& r, std::istringstream& ss, const char* what) {
  T v{};
  if (!(ss >> v)) r.fail(std::string("could not parse ") + what);
  return v;
}

void expect_word(LineReader& r, std::istringstream& ss, const char* word) {
  std::string w;
  if (!(ss >> w) || w != word) r.fail(std::string("expected '") + word + "'");
}

GraphDump read_text(std::istream& is) {
  LineReader r{is};
  {
    std::istringstream ss(r.next("header"));
    std::string magic;
    ss >> magic;
    if (magic != kTextMagic) r.fail("not a layergraph dump");
    if (parse_number<std::uint32_t>(r, ss, "version") != kVersion) r.fail("unsupported version");
  }
  std::size_t n = 0;
  std::size_t m = 0;
  {
    std::istringstream ss(r.keyed("n"));
    n = parse_number<std::size_t>(r, ss, "n");
  }
  {
    std::istringstream ss(r.keyed("m"));
    m = parse_number<std::size_t>(r, ss, "m");
  }
  SeedRecord rec;
  {
    std::istringstream ss(r.keyed("seed"));
    rec.master = parse_number<std::uint64_t>(r, ss, "master seed");
    rec.replicate = parse_number<std::uint64_t>(r, ss, "replicate");
  }
  rec.generator = r.keyed("generator");
  rec.percolation = r.keyed("percolation");
  if (rec.percolation == "-") rec.percolation.clear();
  std::uint64_t hash = 0;
  {
    const std::string h = r.keyed("config_hash");
    char* end = nullptr;
    hash = std::strtoull(h.c_str(), &end, 16);
    if (h.empty() || *end != '\0') r.fail("bad config hash");
  }
  std::vector<NodeId> orig;
  {
    std::istringstream ss(r.keyed("original_ids"));
    const int flag = parse_number<int>(r, ss, "original_ids flag");
    if (flag == 1) {
      std::istringstream os(r.keyed("O"));
      orig.resize(n);
      for (auto& v : orig) v = parse_number<NodeId>(r, os, "original id");
    } else if (flag != 0) {
      r.fail("original_ids flag must be 0 or 1");
    }
  }
  std::vector<Layer> layers;
  layers.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::istringstream hs(r.next("layer header"));
    expect_word(r, hs, "layer");
    if (parse_number<std::size_t>(r, hs, "layer index") != k) r.fail("layers out of order");
    expect_word(r, hs, "size");
    const auto x = parse_number<std::size_t>(r, hs, "size");
    expect_word(r, hs, "strength");
    Layer L;
    L.type.strength = parse_number<double>(r, hs, "strength");
    expect_word(r, hs, "edges");
    const auto e = parse_number<std::size_t>(r, hs, "edge count");
    if (x > n) r.fail("layer larger than n");
    std::istringstream ns(r.keyed("N"));
    L.nodes.resize(x);
    for (auto& v : L.nodes) v = parse_number<NodeId>(r, ns, "node id");
    L.edges.reserve(e);
    for (std::size_t i = 0; i < e; ++i) {
      std::istringstream es(r.keyed("E"));
      const auto u = parse_number<NodeId>(r, es, "edge endpoint");
      const auto v = parse_number<NodeId>(r, es, "edge endpoint");
      L.edges.emplace_back(u, v);
    }
    layers.push_back(std::move(L));
  }
  if (r.next("end") != "end") r.fail("expected 'end'");
  return {build(n, std::move(layers), std::move(rec), std::move(orig)), hash};
}

}  // namespace

void write_text_dump(std::ostream& os, const OverlayGraph& G, std::uint64_t config_hash) {
  os << kTextMagic << ' ' << kVersion << '\n';
  os << "n " << G.n() << '\n';
  os << "m " << G.m() << '\n';
  os << "seed " << G.seed().master << ' ' << G.seed().replicate << '\n';
  os << "generator " << G.seed().generator << '\n';
  os << "percolation " << (G.seed().percolation.empty() ? "-" : G.seed().percolation) << '\n';
  os << "config_hash " << fmt_hash(config_hash) << '\n';
  os << "original_ids " << (G.original_ids().empty() ? 0 : 1) << '\n';
  if (!G.original_ids().empty()) {
    os << 'O';
    for (NodeId v : G.original_ids()) os << ' ' << v;
    os << '\n';
  }
  for (std::size_t k = 0; k < G.m(); ++k) {
    const auto& L = G.layers()[k];
    os << "layer " << k << " size " << L.nodes.size() << " strength " << fmt_double(L.type.strength)
       << " edges " << L.edges.size() << '\n';
    os << 'N';
    for (NodeId v : L.nodes) os << ' ' << v;
    os << '\n';
    for (const auto& e : L.edges) os << "E " << e.u << ' ' << e.v << '\n';
  }
  os << "end\n";
}

void write_binary_dump(std::ostream& os, const OverlayGraph& G, std::uint64_t config_hash) {
  os.write(kBinMagic, 4);
  put_u32(os, kVersion);
  put_u64(os, G.n());
  put_u64(os, G.m());
  put_u64(os, G.seed().master);
  put_u64(os, G.seed().replicate);
  put_u64(os, config_hash);
  put_str(os, G.seed().generator);
  put_str(os, G.seed().percolation);
  put_u32(os, G.original_ids().empty() ? 0 : 1);
  for (NodeId v : G.original_ids()) put_u32(os, v);
  for (const auto& L : G.layers()) {
    put_u64(os, L.nodes.size());
    put_f64(os, L.type.strength);
    put_u64(os, L.edges.size());
    for (NodeId v : L.nodes) put_u32(os, v);
    for (const auto& e : L.edges) {
      put_u32(os, e.u);
      put_u32(os, e.v);
    }
  }
  os.write(kBinTrailer, 4);
}

GraphDump read_dump(std::istream& is) {
  char head[4] = {0, 0, 0, 0};
  if (!is.read(head, 4)) throw FormatError("dump: input too short");
  if (std::memcmp(head, kBinMagic, 4) == 0) return read_binary(is);
  // Not binary: rewind and parse as text.
  is.clear();
  is.seekg(0);
  if (!is) throw FormatError("dump: stream is not seekable");
  return read_text(is);
}

void save_dump(const std::filesystem::path& path, const OverlayGraph& G, std::uint64_t config_hash,
               bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (binary) {
    write_binary_dump(os, G, config_hash);
  } else {
    write_text_dump(os, G, config_hash);
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

GraphDump load_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open dump " + path.string());
  return read_dump(is);
}

}  // namespace layergraph
