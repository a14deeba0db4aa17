"""Active learning for node classification in networks with hidden labels.

Samples the stochastic-block-model posterior over labelings by a single-site
heat-bath Markov chain, scores unexplored nodes by mutual information or
average agreement, and iteratively queries an oracle for the most
informative node's label.
"""

from .campaign import (Campaign, CampaignTrajectory, ConsistencyResult,
                       CuratedOracle, Oracle, Q_THRESHOLDS, StageRecord,
                       accuracy_at_threshold, exploration_order_stats,
                       generate_sbm, make_consistent_dataset, misfit_report,
                       run_campaign)
from .dataio import (DataError, DatasetBundle, export_exploration_stats_csv,
                     export_learning_curve_csv, export_trajectory_json,
                     load_edge_list, load_karate, load_labels,
                     load_trajectory_json)
from .graph import (BlockStats, Graph, GraphError, Labeling, LabelingError,
                    PartialLabeling, block_stats, make_graph, relabel_delta,
                    unexplored_subgraph)
from .likelihood import (PriorConfig, conditional_label_distribution,
                         integrated_log_likelihood, log_likelihood_given_p,
                         max_likelihood_p, model_log_score)
from .sampler import (ChainConfig, MarginalAccumulator, SamplePairStats,
                      equilibrium_check, run_chains, sample_labelings)
from .strategies import (EmptyFrontierError, ScoreVector,
                         average_agreement_scores, betweenness_scores,
                         degree_scores, mutual_information_scores, select_next)

__version__ = "0.1.0"
