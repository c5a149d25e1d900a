#pragma once

#include <array>
#include <string>
#include <vector>

#include "luca/neural.hpp"
#include "luca/sim_env.hpp"

namespace luca {

inline constexpr int kLlmDim = 128;
inline constexpr int kGnnDim = 8;

// instance-level normalizers shared by graph features and action features
struct NormConstants {
  double max_p = 1.0;
  double max_e = 1.0;
  double horizon = 1.0;  // serial-work upper bound on makespan
  int total_ops = 1;

  static NormConstants of(const Instance& inst);
};

enum class OpStatus { done, ready, blocked };

// Heterogeneous scheduling graph flattened into one node list. Operation
// nodes come first (canonical flat order), then machine nodes. Features use
// a unified layout: op slots [0,9), machine slots [9,11); the slots of the
// other node kind stay zero.
struct GraphSnapshot {
  static constexpr int op_feature_dim = 9;
  static constexpr int machine_feature_dim = 2;
  static constexpr int node_feature_dim = op_feature_dim + machine_feature_dim;
  static constexpr int edge_feature_dim = 2;  // normalized p, normalized p*e (0 for precedence)

  struct Neighbor {
    int id;
    std::array<double, edge_feature_dim> edge;
  };

  int n_ops = 0;
  int n_machines = 0;
  std::vector<Vector> node_features;            // n_ops + n_machines entries
  std::vector<std::vector<Neighbor>> adjacency;  // symmetric neighbor lists
  std::vector<OpStatus> op_status;              // per op node
  NormConstants norms;

  int machine_node(int machine_id) const { return n_ops + machine_id; }
};

GraphSnapshot build_graph(const State& state);

// ---- two-layer mean-aggregation message passing ----

struct GnnLayerParams {
  Matrix w_self;
  Matrix w_nbr;
  Matrix w_edge;
  Vector b;
};

struct GnnParams {
  GnnLayerParams l1;  // node_feature_dim -> kGnnDim
  GnnLayerParams l2;  // kGnnDim -> kGnnDim

  static GnnParams zeros();
  static GnnParams init(Rng& rng);
};

struct GnnTrace {
  std::vector<Vector> pre1, post1;
  std::vector<Vector> pre2, post2;
};

struct GnnResult {
  std::vector<Vector> node_embeddings;  // op nodes only, kGnnDim each
  Vector z_gnn;                         // mean pool over op nodes
};

GnnResult gnn_embed(const GraphSnapshot& g, const GnnParams& params, GnnTrace* trace = nullptr);

struct GnnLayerGrads {
  Matrix dw_self;
  Matrix dw_nbr;
  Matrix dw_edge;
  Vector db;
};

struct GnnGrads {
  GnnLayerGrads l1, l2;
  static GnnGrads zeros_like(const GnnParams& p);
};

// d_node_embeddings may be empty (treated as zeros); both seeds combine.
void gnn_backward(const GraphSnapshot& g, const GnnParams& params, const GnnTrace& trace,
                  const std::vector<Vector>& d_node_embeddings, const Vector& d_z_gnn,
                  GnnGrads& grads);

// ---- impact feedback (Eq. 3 / Eq. 4 machinery) ----

struct ImpactRecord {
  int iteration;
  double d_ms;
  double d_ce;
};

// Per-operation logs of makespan/emission impacts over a refresh window,
// with hint flags recomputed on refresh.
class ImpactStore {
 public:
  ImpactStore() = default;
  explicit ImpactStore(int n_ops, int refresh_period = 20);

  // top-fraction rule: flag ops whose window mean exceeds the threshold that
  // leaves ceil(fraction * count) values strictly above it
  void set_percentile_thresholds(double quantile);  // e.g. 0.75
  void set_fixed_thresholds(double tau_ms, double tau_ce);

  void record_impact(int flat_op, double d_ms, double d_ce, int iteration);
  void refresh_hints();

  bool makespan_flag(int flat_op) const { return ms_flag_[flat_op]; }
  bool emission_flag(int flat_op) const { return ce_flag_[flat_op]; }
  double delta_ms(int flat_op) const { return delta_ms_[flat_op]; }
  double delta_ce(int flat_op) const { return delta_ce_[flat_op]; }
  const std::vector<ImpactRecord>& logs(int flat_op) const { return logs_[flat_op]; }
  int refresh_period() const { return refresh_period_; }
  int n_ops() const { return static_cast<int>(logs_.size()); }

 private:
  int refresh_period_ = 20;
  bool percentile_mode_ = true;
  double quantile_ = 0.75;
  double tau_ms_ = 0.0;
  double tau_ce_ = 0.0;
  std::vector<std::vector<ImpactRecord>> logs_;
  std::vector<double> delta_ms_, delta_ce_;
  std::vector<std::uint8_t> ms_flag_, ce_flag_;
};

// ---- state prompt ----

struct PromptRecord {
  std::vector<int> flat_ids;           // canonical (job, op) order
  std::vector<std::string> fragments;  // one per uncompleted op
  std::string document;                // fragments joined with ", "
};

PromptRecord build_state_prompt(const State& state, const ImpactStore& store);

// parses a fragment back into its fields; used by grammar round-trip tests
struct ParsedFragment {
  int job = 0, op = 0, ops_left = 0;
  double est_start = 0.0, dur = 0.0;
  std::vector<std::pair<int, double>> machines;
  bool hint_makespan = false, hint_emission = false;
};
ParsedFragment parse_prompt_fragment(const std::string& fragment);

// ---- gated fusion (scalar gate over projected text + graph embeddings) ----

struct FusionParams {
  Matrix w_proj;  // kGnnDim x kLlmDim
  Vector b_proj;  // kGnnDim
  Matrix w_gate;  // 1 x (2 * kGnnDim)
  Vector b_gate;  // 1

  static FusionParams zeros();
  static FusionParams init(Rng& rng);
};

struct FuseTrace {
  Vector z_llm, z_gnn;
  Vector proj;    // proj(z_llm)
  double u = 0.0;  // gate pre-activation
  double gate = 0.0;
  Vector h;
};

// h = g * proj(z_llm) + (1 - g) * z_gnn,  g = sigmoid(w_gate [proj || z_gnn] + b_gate)
FuseTrace fuse(const Vector& z_llm, const Vector& z_gnn, const FusionParams& params);

struct FusionGrads {
  Matrix dw_proj;
  Vector db_proj;
  Matrix dw_gate;
  Vector db_gate;
  static FusionGrads zeros_like(const FusionParams& p);
};

void fuse_backward(const FusionParams& params, const FuseTrace& trace, const Vector& dh,
                   FusionGrads& grads, Vector* d_z_llm, Vector* d_z_gnn);

}  // namespace luca
