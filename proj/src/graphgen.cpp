#include "interbank/graphgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

namespace interbank::graphgen {

void PowerLawParams::validate() const {
  if (!(beta_exp > 2.0)) throw std::invalid_argument("beta_exp must exceed 2");
  if (!(d_avg >= 1.0)) throw std::invalid_argument("d_avg must be at least 1");
  if (!(m_max >= d_avg)) throw std::invalid_argument("m_max must be at least d_avg");
  if (n_banks < 2) throw std::invalid_argument("n_banks must be at least 2");
  const double max_prob = m_max * m_max / (d_avg * static_cast<double>(n_banks));
  if (!(max_prob < 1.0)) {
    throw std::invalid_argument("wiring probability m_max^2/(d_avg*n_banks) = " +
                                std::to_string(max_prob) + " is not below 1");
  }
}

ChungLuConstants compute_chung_lu_constants(const PowerLawParams& p) {
  p.validate();
  const double n = static_cast<double>(p.n_banks);
  const double ratio = (p.beta_exp - 2.0) / (p.beta_exp - 1.0);
  ChungLuConstants k;
  k.c_scale = ratio * p.d_avg * std::pow(n, 1.0 / (p.beta_exp - 1.0));
  k.i0_offset = n * std::pow((p.d_avg / p.m_max) * ratio, p.beta_exp - 1.0);
  return k;
}

DegreeSequences build_degree_sequences(const PowerLawParams& p, Rng& rng) {
  const ChungLuConstants k = compute_chung_lu_constants(p);
  DegreeSequences s;
  s.c_scale = k.c_scale;
  s.i0_offset = k.i0_offset;
  s.d_in.resize(p.n_banks);
  const double exponent = -1.0 / (p.beta_exp - 1.0);
  for (std::size_t i = 0; i < p.n_banks; ++i) {
    s.d_in[i] = k.c_scale * std::pow(k.i0_offset + static_cast<double>(i), exponent);
  }
  s.d_out = s.d_in;
  std::shuffle(s.d_out.begin(), s.d_out.end(), rng);
  return s;
}

InterbankNetwork wire_network(const DegreeSequences& seqs, const PowerLawParams& p, Rng& rng) {
  const std::size_t n = seqs.d_in.size();
  if (seqs.d_out.size() != n) throw std::invalid_argument("degree sequences differ in length");
  const double norm = p.d_avg * static_cast<double>(p.n_banks);
  const double max_in = n ? *std::max_element(seqs.d_in.begin(), seqs.d_in.end()) : 0.0;
  const double max_out = n ? *std::max_element(seqs.d_out.begin(), seqs.d_out.end()) : 0.0;
  if (!(max_in * max_out / norm < 1.0)) {
    throw std::invalid_argument("maximum wiring probability is not below 1");
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t lender = 0; lender < n; ++lender) {
    const double w = seqs.d_out[lender] / norm;
    for (std::size_t borrower = 0; borrower < n; ++borrower) {
      if (borrower == lender) continue;
      if (unif(rng) < w * seqs.d_in[borrower]) {
        edges.push_back({static_cast<BankId>(borrower), static_cast<BankId>(lender)});
      }
    }
  }
  return InterbankNetwork(n, std::move(edges));
}

InterbankNetwork generate_network(const PowerLawParams& p, std::uint64_t seed) {
  Rng rng = make_stream(seed, hash_string("graphgen"), 0);
  const DegreeSequences seqs = build_degree_sequences(p, rng);
  return wire_network(seqs, p, rng);
}

NetworkFormatError::NetworkFormatError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void write_network(std::ostream& out, const InterbankNetwork& g) {
  out << "n_banks=" << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.borrower << ' ' << e.lender << '\n';
}

namespace {

bool parse_uint(std::string_view text, std::uint64_t& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

InterbankNetwork read_network(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw NetworkFormatError(1, "missing n_banks header");
  constexpr std::string_view kHeader = "n_banks=";
  std::uint64_t n = 0;
  if (line.rfind(kHeader, 0) != 0 || !parse_uint(std::string_view(line).substr(kHeader.size()), n)) {
    throw NetworkFormatError(1, "expected 'n_banks=<N>', got '" + line + "'");
  }

  std::vector<Edge> edges;
  std::set<Edge> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto space = line.find(' ');
    std::uint64_t b = 0, l = 0;
    if (space == std::string::npos || !parse_uint(std::string_view(line).substr(0, space), b) ||
        !parse_uint(std::string_view(line).substr(space + 1), l)) {
      throw NetworkFormatError(line_no, "malformed edge line '" + line + "'");
    }
    if (b >= n || l >= n) throw NetworkFormatError(line_no, "bank id out of range");
    if (b == l) throw NetworkFormatError(line_no, "self-loop at bank " + std::to_string(b));
    const Edge e{static_cast<BankId>(b), static_cast<BankId>(l)};
    if (!seen.insert(e).second) {
      throw NetworkFormatError(line_no, "duplicate edge " + std::to_string(b) + " " + std::to_string(l));
    }
    edges.push_back(e);
  }
  return InterbankNetwork(n, std::move(edges));
}

void save_network(const InterbankNetwork& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_network(out, g);
}

InterbankNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_network(in);
}

}  // namespace interbank::graphgen
