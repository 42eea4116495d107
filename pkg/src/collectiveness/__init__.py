"""Graph-based collectiveness measurement for crowd and particle systems."""

from .clustering import ClusterLabeling, ClusterStats, cluster_stats, threshold_cluster
from .errors import (CollectivenessError, EmptyClipError, InvariantError,
                     ParameterError, ParseError, UndefinedMetricError)
from .graph import (WeightedDigraph, build_knn_graph, clamp_weights, in_neighbors,
                    make_circle, make_rectilinear, prune_zero_edges,
                    read_edgelist_csv, reachable_set, write_edgelist_csv)
from .metrics import (MetricsReport, RunMetrics, aggregate, pairs_comparing_accuracy,
                      relevant_coefficient, roc_auc, run_metrics, sorting_difference)
from .ncl import (Measurement, NclConfig, coherence, graph_collectiveness,
                  learn_clique, learn_cliques, measure, node_collectiveness,
                  write_matrix_csv)
from .sdp import (FrameRecord, SdpParams, SdpState, Simulation, frame_graph,
                  ground_truth, init, measure_simulation, run, simulate, step)
from .trajectory import (ClipMeta, TrajectoryClip, TrajectoryFrame, auc_report,
                         categorize_by_score, clip_collectiveness,
                         load_trajectory_csv, make_synthetic_clip,
                         read_clip_metadata_csv, write_trajectory_csv)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
