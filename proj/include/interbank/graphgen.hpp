#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "interbank/network.hpp"
#include "interbank/random.hpp"

namespace interbank::graphgen {

/// Parameters of the directed power-law (Chung-Lu) generator.
struct PowerLawParams {
  double beta_exp = 2.5;    ///< degree-distribution exponent
  double d_avg = 3.0;       ///< target mean in/out degree
  double m_max = 50.0;      ///< maximum expected in-degree
  std::size_t n_banks = 1000;

  /// Throws std::invalid_argument when beta_exp <= 2, d_avg < 1, m_max < d_avg
  /// or m_max^2 / (d_avg * n_banks) >= 1.
  void validate() const;
};

struct ChungLuConstants {
  double c_scale = 0.0;
  double i0_offset = 0.0;
};

/// c = [(b-2)/(b-1)] d N^{1/(b-1)},  i0 = N [(d/m)(b-2)/(b-1)]^{b-1}.
ChungLuConstants compute_chung_lu_constants(const PowerLawParams& p);

/// Real-valued expected degrees. d_in[k] = c (i0 + k)^{-1/(b-1)}, d_out is a
/// random permutation of d_in.
struct DegreeSequences {
  std::vector<double> d_in;
  std::vector<double> d_out;
  double c_scale = 0.0;
  double i0_offset = 0.0;
};

DegreeSequences build_degree_sequences(const PowerLawParams& p, Rng& rng);

/// Every ordered pair (lender i, borrower j), i != j, is linked independently
/// with probability d_out[i] d_in[j] / (d N). Throws std::invalid_argument if
/// any probability reaches 1.
InterbankNetwork wire_network(const DegreeSequences& seqs, const PowerLawParams& p, Rng& rng);

/// Constants, sequences and wiring from one seeded stream.
InterbankNetwork generate_network(const PowerLawParams& p, std::uint64_t seed);

/// Edge-list format error; carries the 1-based line number.
class NetworkFormatError : public std::runtime_error {
 public:
  NetworkFormatError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Edge-list text format: "n_banks=<N>" then "borrower lender" per line.
void write_network(std::ostream& out, const InterbankNetwork& g);
InterbankNetwork read_network(std::istream& in);
void save_network(const InterbankNetwork& g, const std::filesystem::path& path);
InterbankNetwork load_network(const std::filesystem::path& path);

}  // namespace interbank::graphgen
