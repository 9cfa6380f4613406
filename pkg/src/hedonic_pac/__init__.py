"""PAC learning and PAC stabilization of hedonic games at desk scale.

The package pairs every sampling-based algorithm with an exhaustive
oracle (core solving, exact blocking probabilities, pseudo-shattering)
so its guarantees can be checked exactly on small instances.
"""

from .coalitions import (
    GuardLimitError,
    LabeledSample,
    Partition,
    SampleEntry,
    UndefinedValuationError,
    ValuationProfile,
    coalition_of,
    iter_coalitions,
    iter_partitions,
    iter_subcoalitions,
    members,
    size,
)
from .core import CoreResult, blocking_probability, blocks, consistent_with_sample, solve_core
from .distributions import (
    BoundedRandomDistribution,
    CoalitionDistribution,
    ExplicitDistribution,
    RestrictedUniformDistribution,
    UniformDistribution,
    anon_i1_support,
    dist_from_spec,
    draw_labeled,
    exact_prob,
    floor_log2_inv,
    prob_event_A,
    prob_event_B,
    sample,
    verify_bounded,
)
from .games import (
    AnonymousTable,
    FriendGraph,
    PairValues,
    SizeDecreasingGame,
    anonymous_i1,
    anonymous_i2,
    anonymous_i2_stable_partition,
    avoid_set,
    b_game_alpha,
    eval_additively_separable,
    eval_anonymous,
    eval_b_game,
    eval_friends,
    eval_fractional,
    eval_w_game,
    gen_anonymous,
    gen_friend_graph,
    gen_pair_values,
    gen_size_decreasing,
    make_profile,
)
from .hcn import (
    DecisionList,
    DLRule,
    FirstMatchNet,
    HedonicNet,
    Rule,
    eval_dl,
    eval_formula,
    format_formula,
    format_net,
    hcn_value,
    merge_decision_lists,
    parse_formula,
    parse_net,
    to_hcn,
)
from .learners import (
    NEG_INF,
    AnonymousLearner,
    HcnKdlLearner,
    HcnLinearLearner,
    KDecisionListLearner,
    NotInClassError,
    NotRepresentableError,
    WGamesLearner,
    is_eps_estimate,
    is_eps_estimate_all,
    learn_anonymous,
    learn_hcn_kdl,
    learn_hcn_linear,
    learn_k_dl,
    learn_w_games,
    pseudo_shatters,
)
from .stabilizers import (
    BottomResponsiveStabilizer,
    EnemyAversionStabilizer,
    InsufficientSampleError,
    SrcVerdict,
    StabilizeOutcome,
    WGamesStabilizer,
    check_src,
    green_players,
    stabilize_bottom_responsive,
    stabilize_enemy_aversion,
    stabilize_w_games,
)

__version__ = "0.1.0"
