#include "interbank/cascade.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "interbank/centrality.hpp"

namespace interbank::cascade {

CascadeEngine::CascadeEngine(const InterbankNetwork& g, const balance::BalanceSheetSet& sheets, double k_loss)
    : g_(&g), sheets_(&sheets), k_loss_(k_loss) {
  if (sheets.size() != g.size()) throw std::invalid_argument("balance sheets and network differ in size");
  if (!(k_loss >= 0.0 && k_loss <= 1.0)) throw std::invalid_argument("k_loss must lie in [0, 1]");
  const std::size_t n = g.size();
  loss_scale_.resize(n);
  for (std::size_t i = 0; i < n; ++i) loss_scale_[i] = sheets.banks[i].w / sheets.w_o;
  hits_.assign(n, 0);
  defaulted_.assign(n, 0);
  touched_.assign(n, 0);
  baseline_gscc_ = centrality::gscc_present(g);
}

TrialOutcome CascadeEngine::run(const shocks::ReturnVector& rv) {
  TrialOutcome out;
  run(rv, out, true);
  return out;
}

void CascadeEngine::run(const shocks::ReturnVector& rv, TrialOutcome& out, bool with_gscc) {
  const InterbankNetwork& g = *g_;
  const auto& banks = sheets_->banks;
  const std::size_t n = g.size();
  if (rv.x.size() != n) throw std::invalid_argument("return vector and network differ in size");
  const double unit_loss = k_loss_ * sheets_->l_bar;
  const double threshold = -sheets_->w_o;

  out.defaulted.clear();
  out.fundamental.clear();
  out.rounds = 0;
  frontier_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (rv.x[i] < threshold) {
      defaulted_[i] = 1;
      frontier_.push_back(static_cast<BankId>(i));
    }
  }
  out.fundamental = frontier_;
  out.defaulted = frontier_;

  while (!frontier_.empty()) {
    touched_list_.clear();
    for (BankId j : frontier_) {
      for (BankId i : g.lenders_of(j)) {
        if (defaulted_[i]) continue;
        ++hits_[i];
        if (!touched_[i]) {
          touched_[i] = 1;
          touched_list_.push_back(i);
        }
      }
    }
    next_.clear();
    for (BankId i : touched_list_) {
      touched_[i] = 0;
      const double loss = unit_loss * hits_[i] - loss_scale_[i] * rv.x[i];
      if (loss > banks[i].w) next_.push_back(i);
    }
    for (BankId i : next_) defaulted_[i] = 1;
    if (!next_.empty()) ++out.rounds;
    out.defaulted.insert(out.defaulted.end(), next_.begin(), next_.end());
    frontier_.swap(next_);
  }

  out.n_default = out.defaulted.size();
  if (with_gscc) {
    out.gscc_survives = out.n_default == 0 ? baseline_gscc_ : centrality::gscc_present(g, defaulted_);
  }
  std::sort(out.defaulted.begin(), out.defaulted.end());

  for (BankId i : out.defaulted) {
    defaulted_[i] = 0;
    for (BankId j : g.lenders_of(i)) hits_[j] = 0;
  }
}

TrialOutcome run_cascade(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                         const shocks::ReturnVector& rv, double k_loss) {
  CascadeEngine engine(g, sheets, k_loss);
  return engine.run(rv);
}

bool insolvent_given(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                     const shocks::ReturnVector& rv, double k_loss, std::span<const char> defaulted, BankId i) {
  const balance::BankSheet& s = sheets.banks[i];
  double interbank = 0.0;
  for (BankId j : g.borrowers_of(i)) {
    const double p_bar_j = sheets.banks[j].p_bar;
    const double paid = defaulted[j] ? (1.0 - k_loss) * p_bar_j : p_bar_j;
    interbank += sheets.lending_weight(g, j, i) * paid;
  }
  const double a_ex_post = s.a + (s.w / sheets.w_o) * rv.x[i];
  return s.p_bar > interbank + a_ex_post + s.b - s.d;
}

std::optional<std::string> check_fixed_point(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                                             const shocks::ReturnVector& rv, double k_loss,
                                             std::span<const BankId> defaulted) {
  std::vector<char> in_set(g.size(), 0);
  for (BankId i : defaulted) in_set[i] = 1;
  for (BankId i = 0; i < g.size(); ++i) {
    const bool insolvent = insolvent_given(sheets, g, rv, k_loss, in_set, i);
    if (in_set[i] && !insolvent) return "bank " + std::to_string(i) + " defaulted but is solvent";
    if (!in_set[i] && insolvent) return "bank " + std::to_string(i) + " survived but is insolvent";
  }
  return std::nullopt;
}

TrialOutcome cascade_oracle(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                            const shocks::ReturnVector& rv, double k_loss) {
  const std::size_t n = g.size();
  if (n > 20) throw std::invalid_argument("cascade_oracle is meant for at most 20 banks");
  std::vector<char> in_set(n, 0);
  TrialOutcome out;
  for (std::size_t round = 0;; ++round) {
    std::vector<BankId> added;
    for (BankId i = 0; i < n; ++i) {
      if (!in_set[i] && insolvent_given(sheets, g, rv, k_loss, in_set, i)) added.push_back(i);
    }
    if (added.empty()) break;
    for (BankId i : added) in_set[i] = 1;
    if (round == 0) {
      out.fundamental = added;
    } else {
      ++out.rounds;
    }
  }
  for (BankId i = 0; i < n; ++i) {
    if (in_set[i]) out.defaulted.push_back(i);
  }
  out.n_default = out.defaulted.size();
  if (auto violation = check_fixed_point(sheets, g, rv, k_loss, out.defaulted)) {
    throw std::logic_error("cascade oracle: " + *violation);
  }
  out.gscc_survives = centrality::gscc_present(g, std::span<const char>(in_set));
  return out;
}

void write_outcome_header(std::ostream& out) { out << "trial,n_default,n_fundamental,rounds,gscc_survives\n"; }

void write_outcome_row(std::ostream& out, std::uint64_t trial, const TrialOutcome& o) {
  out << trial << ',' << o.n_default << ',' << o.fundamental.size() << ',' << o.rounds << ','
      << (o.gscc_survives ? 1 : 0) << '\n';
}

}  // namespace interbank::cascade
