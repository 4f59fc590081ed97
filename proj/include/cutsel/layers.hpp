#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cutsel/rng.hpp"
#include "cutsel/tape.hpp"

namespace cutsel {

void init_uniform(Parameter& p, double bound, Rng& rng);
void zero_grads(const ParamList& params);
std::vector<double> flatten_values(const ParamList& params);
void load_values(const ParamList& params, const std::vector<double>& flat);
std::vector<double> flatten_grads(const ParamList& params);
long param_count(const ParamList& params);

// Multi-layer perceptron: tanh hidden layers, linear output.
struct Mlp {
  std::vector<Parameter> weights, biases;

  Mlp() = default;
  Mlp(const std::string& prefix, const std::vector<int>& sizes, Rng& rng);
  int forward(Tape& tape, int x) const;
  ParamList params();
  ParamList params() const;
};

// Single-layer LSTM with per-gate weights. Weight init is uniform
// +-1/sqrt(fan_in); the forget-gate bias starts at +1.
struct Lstm {
  int input_size = 0, hidden = 0;
  Parameter wi, ui, bi, wf, uf, bf, wg, ug, bg, wo, uo, bo;

  Lstm() = default;
  Lstm(const std::string& prefix, int input_size, int hidden, Rng& rng);

  struct State {
    int h = -1, c = -1;  // tape node ids
  };

  State initial(Tape& tape) const;  // zero vectors
  State step(Tape& tape, int x, const State& prev) const;
  // Runs the sequence; returns per-step hidden ids and the final state.
  // An empty sequence yields no outputs and the zero initial state.
  std::pair<std::vector<int>, State> run(Tape& tape, const std::vector<int>& xs) const;
  ParamList params();
  ParamList params() const;
};

// Additive attention used as a pointer: score_i = v . tanh(W_ref e_i + W_q q).
struct AdditiveAttention {
  int hidden = 0;
  Parameter w_ref, w_q, v;

  AdditiveAttention() = default;
  AdditiveAttention(const std::string& prefix, int hidden, Rng& rng);

  // Precomputes W_ref * e_i once per decode.
  std::vector<int> project_refs(Tape& tape, const std::vector<int>& refs) const;
  // Logit vector over the references for one query.
  int scores(Tape& tape, const std::vector<int>& ref_projs, int query) const;
  ParamList params();
  ParamList params() const;
};

inline void append_params(ParamList& out, const ParamList& in) {
  out.insert(out.end(), in.begin(), in.end());
}

}  // namespace cutsel
