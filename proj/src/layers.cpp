#include "cutsel/layers.hpp"

#include <cmath>

namespace cutsel {

void init_uniform(Parameter& p, double bound, Rng& rng) {
  for (double& x : p.value.v) x = (2.0 * rng.uniform() - 1.0) * bound;
}

void zero_grads(const ParamList& params) {
  for (Parameter* p : params) p->zero_grad();
}

std::vector<double> flatten_values(const ParamList& params) {
  std::vector<double> flat;
  for (const Parameter* p : params) flat.insert(flat.end(), p->value.v.begin(), p->value.v.end());
  return flat;
}

void load_values(const ParamList& params, const std::vector<double>& flat) {
  std::size_t k = 0;
  for (Parameter* p : params) {
    require_shape(k + p->value.v.size() <= flat.size(), "flat vector too short");
    std::copy(flat.begin() + static_cast<long>(k),
              flat.begin() + static_cast<long>(k + p->value.v.size()), p->value.v.begin());
    k += p->value.v.size();
  }
  require_shape(k == flat.size(), "flat vector length mismatch");
}

std::vector<double> flatten_grads(const ParamList& params) {
  std::vector<double> flat;
  for (const Parameter* p : params) flat.insert(flat.end(), p->grad.v.begin(), p->grad.v.end());
  return flat;
}

long param_count(const ParamList& params) {
  long total = 0;
  for (const Parameter* p : params) total += p->value.numel();
  return total;
}

Mlp::Mlp(const std::string& prefix, const std::vector<int>& sizes, Rng& rng) {
  for (std::size_t layer = 0; layer + 1 < sizes.size(); ++layer) {
    const int in = sizes[layer], out = sizes[layer + 1];
    weights.emplace_back(prefix + "/w" + std::to_string(layer), out, in);
    biases.emplace_back(prefix + "/b" + std::to_string(layer), out, 1);
    init_uniform(weights.back(), 1.0 / std::sqrt(static_cast<double>(in)), rng);
  }
}

int Mlp::forward(Tape& tape, int x) const {
  int h = x;
  for (std::size_t layer = 0; layer < weights.size(); ++layer) {
    h = tape.affine(tape.leaf(const_cast<Parameter&>(weights[layer])), h,
                    tape.leaf(const_cast<Parameter&>(biases[layer])));
    if (layer + 1 < weights.size()) h = tape.tanh_op(h);
  }
  return h;
}

ParamList Mlp::params() {
  ParamList out;
  for (Parameter& p : weights) out.push_back(&p);
  for (Parameter& p : biases) out.push_back(&p);
  return out;
}

ParamList Mlp::params() const { return const_cast<Mlp*>(this)->params(); }

namespace {

Parameter make_gate_w(const std::string& name, int out, int in, Rng& rng) {
  Parameter p(name, out, in);
  init_uniform(p, 1.0 / std::sqrt(static_cast<double>(in)), rng);
  return p;
}

}  // namespace

Lstm::Lstm(const std::string& prefix, int input_size_, int hidden_, Rng& rng)
    : input_size(input_size_), hidden(hidden_) {
  wi = make_gate_w(prefix + "/wi", hidden, input_size, rng);
  ui = make_gate_w(prefix + "/ui", hidden, hidden, rng);
  bi = Parameter(prefix + "/bi", hidden, 1);
  wf = make_gate_w(prefix + "/wf", hidden, input_size, rng);
  uf = make_gate_w(prefix + "/uf", hidden, hidden, rng);
  bf = Parameter(prefix + "/bf", hidden, 1);
  bf.value.fill(1.0);
  wg = make_gate_w(prefix + "/wg", hidden, input_size, rng);
  ug = make_gate_w(prefix + "/ug", hidden, hidden, rng);
  bg = Parameter(prefix + "/bg", hidden, 1);
  wo = make_gate_w(prefix + "/wo", hidden, input_size, rng);
  uo = make_gate_w(prefix + "/uo", hidden, hidden, rng);
  bo = Parameter(prefix + "/bo", hidden, 1);
}

Lstm::State Lstm::initial(Tape& tape) const {
  State s;
  s.h = tape.constant(Tensor::zeros(hidden, 1));
  s.c = tape.constant(Tensor::zeros(hidden, 1));
  return s;
}

Lstm::State Lstm::step(Tape& tape, int x, const State& prev) const {
  auto gate = [&](const Parameter& w, const Parameter& u, const Parameter& b) {
    return tape.add(tape.affine(tape.leaf(const_cast<Parameter&>(w)), x,
                                tape.leaf(const_cast<Parameter&>(b))),
                    tape.matvec(tape.leaf(const_cast<Parameter&>(u)), prev.h));
  };
  const int i = tape.sigmoid_op(gate(wi, ui, bi));
  const int f = tape.sigmoid_op(gate(wf, uf, bf));
  const int g = tape.tanh_op(gate(wg, ug, bg));
  const int o = tape.sigmoid_op(gate(wo, uo, bo));
  State next;
  next.c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
  next.h = tape.mul(o, tape.tanh_op(next.c));
  return next;
}

std::pair<std::vector<int>, Lstm::State> Lstm::run(Tape& tape,
                                                   const std::vector<int>& xs) const {
  State state = initial(tape);
  std::vector<int> hiddens;
  hiddens.reserve(xs.size());
  for (int x : xs) {
    state = step(tape, x, state);
    hiddens.push_back(state.h);
  }
  return {hiddens, state};
}

ParamList Lstm::params() {
  return {&wi, &ui, &bi, &wf, &uf, &bf, &wg, &ug, &bg, &wo, &uo, &bo};
}

ParamList Lstm::params() const { return const_cast<Lstm*>(this)->params(); }

AdditiveAttention::AdditiveAttention(const std::string& prefix, int hidden_, Rng& rng)
    : hidden(hidden_) {
  w_ref = make_gate_w(prefix + "/w_ref", hidden, hidden, rng);
  w_q = make_gate_w(prefix + "/w_q", hidden, hidden, rng);
  v = make_gate_w(prefix + "/v", hidden, 1, rng);
}

std::vector<int> AdditiveAttention::project_refs(Tape& tape,
                                                 const std::vector<int>& refs) const {
  const int w = tape.leaf(const_cast<Parameter&>(w_ref));
  std::vector<int> out;
  out.reserve(refs.size());
  for (int r : refs) out.push_back(tape.matvec(w, r));
  return out;
}

int AdditiveAttention::scores(Tape& tape, const std::vector<int>& ref_projs,
                              int query) const {
  const int q_proj = tape.matvec(tape.leaf(const_cast<Parameter&>(w_q)), query);
  const int v_leaf = tape.leaf(const_cast<Parameter&>(v));
  std::vector<int> logits;
  logits.reserve(ref_projs.size());
  for (int rp : ref_projs)
    logits.push_back(tape.dot(v_leaf, tape.tanh_op(tape.add(rp, q_proj))));
  return tape.stack(logits);
}

ParamList AdditiveAttention::params() { return {&w_ref, &w_q, &v}; }

ParamList AdditiveAttention::params() const {
  return const_cast<AdditiveAttention*>(this)->params();
}

}  // namespace cutsel
