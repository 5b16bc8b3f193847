#include "shardsim/schedule.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>

#include "shardsim/error.hpp"

namespace shardsim {

namespace {

constexpr EventId kNoEvent = static_cast<EventId>(-1);

bool set_covers_trainable(ParamSet set) { return set != ParamSet::FrozenOnly; }
bool set_covers_frozen(ParamSet set) { return set != ParamSet::TrainableOnly; }

struct Builder {
  const StrategyPlan& plan;
  const ModelSpec& model;
  const ClusterTopology& topo;
  const std::vector<ParamState>& states;
  const BuildOptions& opts;
  EventProgram prog;

  std::vector<EventId> fwd_compute;
  std::vector<EventId> bwd_compute_order;  // by backward position
  std::vector<EventId> fwd_d2h;            // per layer, kNoEvent if absent
  std::vector<EventId> rs_events;
  EventId prev_compute = kNoEvent;

  Builder(const StrategyPlan& p, const ModelSpec& m, const ClusterTopology& t,
          const std::vector<ParamState>& s, std::uint64_t iteration, const BuildOptions& o)
      : plan(p), model(m), topo(t), states(s), opts(o) {
    prog.iteration_index = iteration;
    prog.strategy = p.kind;
    const int L = m.num_layers();
    prog.layer_retained.assign(L, 0);
    prog.layer_clean_path.assign(L, 0);
    prog.layer_dirty_path.assign(L, 0);
    fwd_compute.assign(L, kNoEvent);
    fwd_d2h.assign(L, kNoEvent);
  }

  EventId emit(EventKind kind, int layer, ParamSet set, std::uint64_t bytes,
               std::vector<EventId> deps) {
    Event ev;
    ev.id = static_cast<EventId>(prog.events.size());
    ev.kind = kind;
    ev.layer = layer;
    ev.param_set = set;
    ev.bytes_total = bytes;
    for (EventId d : deps) {
      if (d == kNoEvent) continue;
      if (std::find(ev.deps.begin(), ev.deps.end(), d) == ev.deps.end()) ev.deps.push_back(d);
    }
    prog.events.push_back(std::move(ev));
    return prog.events.back().id;
  }

  std::uint64_t bytes_of(int layer, ParamSet set) const {
    switch (set) {
      case ParamSet::All:
        return layer_bytes(model, layer);
      case ParamSet::TrainableOnly:
        return layer_trainable_bytes(model, layer);
      case ParamSet::FrozenOnly:
        return layer_frozen_bytes(model, layer);
    }
    return 0;
  }

  bool portion_dirty(int layer, bool frozen) const {
    const int idx = param_state_index(states, layer, frozen);
    return idx >= 0 && states[static_cast<std::size_t>(idx)].dirty;
  }
  bool has_portion(int layer, bool frozen) const {
    return param_state_index(states, layer, frozen) >= 0;
  }

  EventKind gather_kind() const {
    // MiCS confined to a node gathers on the intra fabric only; everything
    // else is a (possibly single-node) global gather.
    if (plan.kind == StrategyKind::MiCS && plan.collective_scope_nodes(topo) <= 1)
      return EventKind::AgIntra;
    return EventKind::AgInter;
  }

  void build();
  void forward();
  void backward();
  void tail();
};

struct FwdChain {
  EventId head = kNoEvent;
  std::vector<EventId> tails;
  std::optional<ParamSet> gathered;  // set carried by the AgInter, if any
};

void Builder::build() {
  forward();
  backward();
  tail();
}

void Builder::forward() {
  const int L = model.num_layers();
  const bool fcdp_family =
      plan.kind == StrategyKind::Fcdp || plan.kind == StrategyKind::FcdpComm;

  const std::uint64_t persistent =
      memory_footprint(plan, model, topo).gpu_persistent_bytes;
  const std::uint64_t act_full =
      activation_bytes_per_sample_total(model) * static_cast<std::uint64_t>(model.batch_per_gpu);
  std::uint64_t admitted_cache = 0;

  EventId prev_head = kNoEvent;
  for (int l = 0; l < L; ++l) {
    // Depth-1 prefetch window: this layer's reconstruction may begin once the
    // previous layer's chain has issued and the buffer two layers back has
    // been released by its forward compute.
    std::vector<EventId> window;
    if (prev_head != kNoEvent) window.push_back(prev_head);
    if (l >= 2) window.push_back(fwd_compute[l - 2]);
    if (!opts.prefetch && l >= 1) window.push_back(fwd_compute[l - 1]);

    FwdChain chain;
    switch (plan.kind) {
      case StrategyKind::Zero2:
        break;  // parameters resident, no reconstruction
      case StrategyKind::Zero3:
      case StrategyKind::MiCS:
      case StrategyKind::ZeroPP: {
        chain.head = emit(gather_kind(), l, ParamSet::All, bytes_of(l, ParamSet::All), window);
        chain.tails.push_back(chain.head);
        break;
      }
      case StrategyKind::Fcdp:
      case StrategyKind::FcdpComm: {
        const bool has_t = has_portion(l, false);
        const bool has_f = has_portion(l, true);
        bool gather_t = has_t && portion_dirty(l, false);
        bool gather_f = has_f && portion_dirty(l, true);
        if (plan.kind == StrategyKind::Fcdp && (gather_t || gather_f)) {
          // Not PEFT-aware: any stale portion re-gathers the whole layer.
          gather_t = has_t;
          gather_f = has_f;
        }
        std::optional<ParamSet> gset;
        if (gather_t && gather_f)
          gset = ParamSet::All;
        else if (gather_t)
          gset = has_f ? ParamSet::TrainableOnly : ParamSet::All;
        else if (gather_f)
          gset = has_t ? ParamSet::FrozenOnly : ParamSet::All;
        std::optional<ParamSet> cset;
        const bool cache_t = has_t && !gather_t;
        const bool cache_f = has_f && !gather_f;
        if (cache_t && cache_f)
          cset = ParamSet::All;
        else if (cache_t)
          cset = has_f ? ParamSet::TrainableOnly : ParamSet::All;
        else if (cache_f)
          cset = has_t ? ParamSet::FrozenOnly : ParamSet::All;

        if (gset) {
          const EventId ag = emit(EventKind::AgInter, l, *gset, bytes_of(l, *gset), window);
          chain.head = ag;
          chain.tails.push_back(ag);
          chain.gathered = *gset;
          prog.layer_dirty_path[l] = 1;
        }
        if (cset) {
          const EventId h2d = emit(EventKind::H2D, l, *cset, bytes_of(l, *cset), window);
          const EventId agi = emit(EventKind::AgIntra, l, *cset, bytes_of(l, *cset), {h2d});
          if (chain.head == kNoEvent) chain.head = h2d;
          chain.tails.push_back(agi);
          prog.layer_clean_path[l] = 1;
        }
        break;
      }
    }

    std::vector<EventId> cdeps = chain.tails;
    cdeps.push_back(prev_compute);
    const double coeff = model.layers[static_cast<std::size_t>(l)].fwd_compute_s_per_sample;
    (void)coeff;
    fwd_compute[l] = emit(EventKind::ComputeFwd, l, ParamSet::All, 0, cdeps);
    prev_compute = fwd_compute[l];

    if (fcdp_family) {
      // tau admission, decided after this layer's forward compute: keep the
      // gathered layer on device when projected utilization stays below
      // tau * capacity. Projection is conservative: full-batch activations.
      bool retained = false;
      if (plan.tau > 0.0) {
        const std::uint64_t next_gather = l + 1 < L ? bytes_of(l + 1, ParamSet::All) : 0;
        const std::uint64_t projected = persistent + admitted_cache +
                                        bytes_of(l, ParamSet::All) + next_gather + act_full;
        retained = opts.gpu_capacity_bytes == 0 ||
                   static_cast<double>(projected) <
                       plan.tau * static_cast<double>(opts.gpu_capacity_bytes);
        if (retained) {
          prog.layer_retained[l] = 1;
          admitted_cache += bytes_of(l, ParamSet::All);
        }
      }
      if (chain.gathered) {
        // Host-cache refresh of the portions just re-gathered. Retention
        // suppresses the trainable refresh only: a frozen portion must reach
        // the host cache or it would be re-gathered forever.
        std::optional<ParamSet> refresh = chain.gathered;
        if (retained) {
          if (*refresh == ParamSet::All && has_portion(l, true))
            refresh = ParamSet::FrozenOnly;
          else if (*refresh != ParamSet::FrozenOnly)
            refresh.reset();
        }
        if (refresh)
          fwd_d2h[l] =
              emit(EventKind::D2H, l, *refresh, bytes_of(l, *refresh), {fwd_compute[l]});
      }
    }
    if (chain.head != kNoEvent) prev_head = chain.head;
  }
}

void Builder::backward() {
  const int L = model.num_layers();
  const bool fcdp_family =
      plan.kind == StrategyKind::Fcdp || plan.kind == StrategyKind::FcdpComm;

  EventId prev_head = kNoEvent;
  for (int pos = 0; pos < L; ++pos) {
    const int l = L - 1 - pos;

    std::vector<EventId> window;
    window.push_back(prev_head != kNoEvent ? prev_head : fwd_compute[L - 1]);
    if (pos >= 2) window.push_back(bwd_compute_order[static_cast<std::size_t>(pos) - 2]);
    if (!opts.prefetch) window.push_back(prev_compute);

    std::vector<EventId> tails;
    EventId head = kNoEvent;
    if (plan.kind == StrategyKind::Zero2 || prog.layer_retained[l]) {
      // parameters already resident on the GPU
    } else if (plan.kind == StrategyKind::Zero3 || plan.kind == StrategyKind::MiCS) {
      head = emit(gather_kind(), l, ParamSet::All, bytes_of(l, ParamSet::All), window);
      tails.push_back(head);
    } else if (plan.kind == StrategyKind::ZeroPP) {
      // reconstruction from the node-level GPU replica
      head = emit(EventKind::AgIntra, l, ParamSet::All, bytes_of(l, ParamSet::All), window);
      tails.push_back(head);
    } else if (fcdp_family) {
      if (fwd_d2h[l] != kNoEvent) window.push_back(fwd_d2h[l]);
      head = emit(EventKind::H2D, l, ParamSet::All, bytes_of(l, ParamSet::All), window);
      const EventId agi =
          emit(EventKind::AgIntra, l, ParamSet::All, bytes_of(l, ParamSet::All), {head});
      tails.push_back(agi);
    }

    std::vector<EventId> cdeps = tails;
    cdeps.push_back(prev_compute);
    const EventId cb = emit(EventKind::ComputeBwd, l, ParamSet::All, 0, cdeps);
    bwd_compute_order.push_back(cb);
    prev_compute = cb;

    if (layer_trainable_bytes(model, l) > 0)
      rs_events.push_back(emit(EventKind::ReduceScatter, l, ParamSet::TrainableOnly,
                               layer_trainable_bytes(model, l), {cb}));
    if (head != kNoEvent) prev_head = head;
  }
}

void Builder::tail() {
  std::vector<EventId> odeps = rs_events;
  odeps.push_back(prev_compute);
  const EventId opt = emit(EventKind::OptimizerStep, -1, ParamSet::TrainableOnly, 0, odeps);

  if (plan.kind == StrategyKind::Zero2) {
    // replicated parameters re-synchronized after the shard-local update
    emit(EventKind::Broadcast, -1, ParamSet::All, param_bytes(model), {opt});
  }

  const bool marks_dirty = plan.kind == StrategyKind::Zero3 || plan.kind == StrategyKind::MiCS ||
                           plan.kind == StrategyKind::Fcdp || plan.kind == StrategyKind::FcdpComm;
  if (marks_dirty) {
    for (int l = 0; l < model.num_layers(); ++l)
      if (layer_trainable_bytes(model, l) > 0)
        emit(EventKind::MaskDirty, l, ParamSet::TrainableOnly, 0, {opt});
  }
}

void validate_states(const StrategyPlan& plan, const ModelSpec& model,
                     const std::vector<ParamState>& states) {
  const std::vector<ParamState> expected = init_param_states(model);
  if (states.size() != expected.size())
    throw ProtocolError("param state list does not match the model's portion layout");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const ParamState& st = states[i];
    if (st.layer != expected[i].layer || st.frozen != expected[i].frozen)
      throw ProtocolError("param state list does not match the model's portion layout");
    if (st.frozen && st.version != 0)
      throw ProtocolError("frozen portion with nonzero version");
    if (!plan.uses_host_cache()) continue;
    const bool stale = !st.host_cached_version || *st.host_cached_version != st.version;
    if (!st.dirty && !st.host_cached_version)
      throw ProtocolError("clean flag with empty host cache");
    if (st.dirty != stale)
      throw ProtocolError("dirty flag inconsistent with host cache version");
  }
}

}  // namespace

std::vector<ParamState> init_param_states(const ModelSpec& model) {
  std::vector<ParamState> states;
  for (int l = 0; l < model.num_layers(); ++l) {
    if (layer_trainable_bytes(model, l) > 0) {
      ParamState st;
      st.layer = l;
      st.frozen = false;
      states.push_back(st);
    }
    if (layer_frozen_bytes(model, l) > 0) {
      ParamState st;
      st.layer = l;
      st.frozen = true;
      states.push_back(st);
    }
  }
  return states;
}

int param_state_index(const std::vector<ParamState>& states, int layer, bool frozen) {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].layer == layer && states[i].frozen == frozen) return static_cast<int>(i);
  return -1;
}

EventProgram build_iteration(const StrategyPlan& plan, const ModelSpec& model,
                             const ClusterTopology& topo, const std::vector<ParamState>& states,
                             std::uint64_t iteration_index, const BuildOptions& opts) {
  plan.validate(topo);
  model.validate();
  if (iteration_index < 1) throw ConfigError("iteration_index: must be >= 1");
  validate_states(plan, model, states);

  Builder builder(plan, model, topo, states, iteration_index, opts);
  builder.build();
  return std::move(builder.prog);
}

std::vector<ParamState> step_state(std::vector<ParamState> states, const EventProgram& program) {
  for (const Event& ev : program.events) {
    switch (ev.kind) {
      case EventKind::D2H: {
        for (ParamState& st : states) {
          if (st.layer != ev.layer) continue;
          if (st.frozen ? !set_covers_frozen(ev.param_set) : !set_covers_trainable(ev.param_set))
            continue;
          st.host_cached_version = st.version;
          st.dirty = false;
        }
        break;
      }
      case EventKind::OptimizerStep: {
        for (ParamState& st : states)
          if (!st.frozen) st.version += 1;
        break;
      }
      case EventKind::MaskDirty: {
        for (ParamState& st : states) {
          if (st.layer != ev.layer) continue;
          if (st.frozen ? !set_covers_frozen(ev.param_set) : !set_covers_trainable(ev.param_set))
            continue;
          st.dirty = true;
        }
        break;
      }
      default:
        break;
    }
  }
  for (ParamState& st : states) st.gpu_cached = false;
  return states;
}

std::string serialize_program(const EventProgram& program) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "program iteration=%llu strategy=%s events=%zu\n",
                static_cast<unsigned long long>(program.iteration_index),
                to_string(program.strategy), program.events.size());
  out += buf;
  for (const Event& ev : program.events) {
    std::snprintf(buf, sizeof(buf), "%u %s ", ev.id, to_string(ev.kind));
    out += buf;
    if (ev.layer >= 0) {
      std::snprintf(buf, sizeof(buf), "%d", ev.layer);
      out += buf;
    } else {
      out += "-";
    }
    std::snprintf(buf, sizeof(buf), " %s %llu deps=", to_string(ev.param_set),
                  static_cast<unsigned long long>(ev.bytes_total));
    out += buf;
    for (std::size_t i = 0; i < ev.deps.size(); ++i) {
      if (i) out += ",";
      std::snprintf(buf, sizeof(buf), "%u", ev.deps[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::AgInter:
      return "ag_inter";
    case EventKind::AgIntra:
      return "ag_intra";
    case EventKind::H2D:
      return "h2d";
    case EventKind::D2H:
      return "d2h";
    case EventKind::ComputeFwd:
      return "compute_fwd";
    case EventKind::ComputeBwd:
      return "compute_bwd";
    case EventKind::ReduceScatter:
      return "reduce_scatter";
    case EventKind::OptimizerStep:
      return "optimizer_step";
    case EventKind::MaskDirty:
      return "mask_dirty";
    case EventKind::Broadcast:
      return "broadcast";
  }
  return "?";
}

const char* to_string(ParamSet set) {
  switch (set) {
    case ParamSet::All:
      return "all";
    case ParamSet::TrainableOnly:
      return "trainable";
    case ParamSet::FrozenOnly:
      return "frozen";
  }
  return "?";
}

}  // namespace shardsim
