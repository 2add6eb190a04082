"""Learning constructors: policy gradient over parity matrices and an
advantage actor-critic over nested polar reliability sequences.

The PG constructor samples a real matrix around the policy net's output,
thresholds it at 0.5 into the parity part of [I | P], and ascends
reward-weighted Gaussian log density, with batch rewards normalized.
The A2C constructor grows an information set one subchannel per step;
the actor is a masked softmax over not-yet-selected positions and the
critic a scalar state value, both updated from the one-step advantage.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from . import evaluate
from .channel import derive_seed
from .linear import LinearCode
from .mlp import AdamState, MlpParams, adam_step, mlp_backward, mlp_forward
from .polar import PolarCode

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Policy gradient over generator matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PgConfig:
    k: int
    n: int
    batch_size: int = 1024
    learning_rate: float = 1e-5
    sigma2: float = 0.1
    seed: int = 0
    hidden_width: int | None = None

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError("need 0 < K < N")
        if self.batch_size < 1 or self.learning_rate <= 0 or self.sigma2 <= 0:
            raise ValueError("batch size, learning rate, sigma2 must be positive")
        if self.hidden_width is None:
            object.__setattr__(self, "hidden_width",
                               2 * self.k * (self.n - self.k))

    @property
    def parity_cells(self) -> int:
        return self.k * (self.n - self.k)

    def input_state(self) -> np.ndarray:
        """The fixed input [I_K | 0], flattened row-major."""
        s0 = np.zeros((self.k, self.n))
        s0[:, :self.k] = np.eye(self.k)
        return s0.ravel()

    def make_policy(self) -> MlpParams:
        return MlpParams.init(
            (self.k * self.n, self.hidden_width, self.hidden_width,
             self.parity_cells),
            output_activation="sigmoid", seed=derive_seed(self.seed, "policy"))


def gaussian_log_density(a: np.ndarray, mu: np.ndarray, sigma2: float) -> float:
    """Joint log density of independent cells a_i ~ Normal(mu_i, sigma2)."""
    a = np.asarray(a, dtype=np.float64)
    diff = a - mu
    return float(-0.5 * a.size * np.log(2.0 * np.pi * sigma2)
                 - (diff * diff).sum() / (2.0 * sigma2))


def pg_sample_construction(policy: MlpParams, cfg: PgConfig, rng):
    """Sample a construction; returns (LinearCode, action matrix, log density)."""
    mu, _ = mlp_forward(policy, cfg.input_state())
    if not np.all(np.isfinite(mu)):
        raise FloatingPointError("policy produced non-finite means")
    a = mu + np.sqrt(cfg.sigma2) * rng.standard_normal(mu.size)
    p = (a > 0.5).astype(np.uint8).reshape(cfg.k, cfg.n - cfg.k)
    g = np.hstack([np.eye(cfg.k, dtype=np.uint8), p])
    return LinearCode(g), a, gaussian_log_density(a, mu, cfg.sigma2)


def normalize_rewards(rewards: np.ndarray) -> tuple[np.ndarray, bool]:
    """Zero-mean unit-variance rewards; zero variance keeps centered values."""
    r = np.asarray(rewards, dtype=np.float64)
    centered = r - r.mean()
    std = centered.std()
    if std == 0.0:
        return centered, True
    return centered / std, False


def pg_update(policy: MlpParams, actions: np.ndarray, rewards: np.ndarray,
              cfg: PgConfig, state: AdamState) -> bool:
    """Ascend sum_b reward_b * log density(a_b | mu) over one batch.

    actions is (B, K(N-K)) as sampled; rewards is (B,). Returns True when
    the batch had zero reward variance (update degenerates to centered
    rewards, typically a no-op).
    """
    actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
    if actions.shape[0] != len(rewards):
        raise ValueError("batch size mismatch between actions and rewards")
    r_hat, degenerate = normalize_rewards(rewards)
    if degenerate:
        log.warning("zero reward variance in PG batch; using centered rewards")
    mu, cache = mlp_forward(policy, cfg.input_state())
    # d(-surrogate)/dmu, accumulated over the batch
    dmu = -(r_hat[:, None] * (actions - mu[None, :])).sum(axis=0) / cfg.sigma2
    grads = mlp_backward(policy, cache, dmu)
    adam_step(policy, grads, state)
    return degenerate


@dataclass
class PgResult:
    best_code: LinearCode
    best_reward: float
    mean_reward_trace: list
    best_reward_trace: list


def run_pg(cfg: PgConfig, decoder: evaluate.DecoderSpec, budget: evaluate.EvalBudget,
           iterations: int, target_bler: float = 1e-2,
           scan_lo: float = -2.0, scan_hi: float = 16.0,
           workers: int = 1) -> PgResult:
    """Sample / evaluate / update loop; reward is minus the required SNR.

    Required-SNR searches run at the coarse 0.25 dB grid resolution and
    are cached by parity matrix, so repeat constructions cost nothing.
    The scan warm-starts near the previous result once one exists.
    """
    rng = np.random.default_rng(derive_seed(cfg.seed, "pg-sample"))
    policy = cfg.make_policy()
    state = AdamState.init(policy, cfg.learning_rate)
    cache: dict[bytes, float] = {}
    last_req: float | None = None

    def reward_of(code: LinearCode) -> float:
        nonlocal last_req
        key = code.parity.tobytes()
        if key not in cache:
            sub = evaluate.EvalBudget(derive_seed(cfg.seed, f"pg-eval:{key.hex()}"),
                                      budget.min_error_events, budget.max_frames,
                                      budget.batch_frames)
            lo = scan_lo if last_req is None else max(scan_lo, last_req - 1.0)
            req = evaluate.required_esn0(
                code, decoder, sub, target_bler=target_bler,
                scan_lo=lo, scan_hi=scan_hi, resolution=0.25, workers=workers)
            cache[key] = evaluate.reward("neg_esn0", req)
            last_req = req
        return cache[key]

    best_code = None
    best_reward = -np.inf
    mean_trace: list[float] = []
    best_trace: list[float] = []
    for _ in range(iterations):
        actions = np.empty((cfg.batch_size, cfg.parity_cells))
        rewards = np.empty(cfg.batch_size)
        for b in range(cfg.batch_size):
            code, a, _ = pg_sample_construction(policy, cfg, rng)
            actions[b] = a
            rewards[b] = reward_of(code)
            if rewards[b] > best_reward:
                best_reward = float(rewards[b])
                best_code = code
        pg_update(policy, actions, rewards, cfg, state)
        mean_trace.append(float(rewards.mean()))
        best_trace.append(best_reward)
    return PgResult(best_code, best_reward, mean_trace, best_trace)


# ---------------------------------------------------------------------------
# A2C over nested reliability sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class A2cConfig:
    n: int
    k_low: int
    k_high: int
    esn0_db: float
    batch_size: int = 32
    actor_lr: float = 1e-3
    critic_lr: float = 2e-3
    gamma: float = 0.2
    seed: int = 0
    hidden_width: int | None = None
    # preset_count "short" puts K_low - 1 top indices in the start state,
    # so the first action completes the K_low-dimensional code; "full"
    # presets K_low indices instead.
    preset_style: str = "short"

    def __post_init__(self):
        if not 1 <= self.k_low <= self.k_high < self.n:
            raise ValueError("need 1 <= K_low <= K_high < N")
        if self.preset_style not in ("short", "full"):
            raise ValueError("preset_style must be 'short' or 'full'")
        if self.hidden_width is None:
            object.__setattr__(self, "hidden_width", 4 * self.n)

    def preset_indices(self) -> list[int]:
        count = self.k_low - 1 if self.preset_style == "short" else self.k_low
        return [self.n - 1 - i for i in range(count)]

    def steps_per_episode(self) -> int:
        return self.k_high - self.k_low + 1

    def make_actor(self) -> MlpParams:
        return MlpParams.init((self.n, self.hidden_width, self.hidden_width,
                               self.n), "identity", derive_seed(self.seed, "actor"))

    def make_critic(self) -> MlpParams:
        return MlpParams.init((self.n, self.hidden_width, self.hidden_width, 1),
                              "identity", derive_seed(self.seed, "critic"))


@dataclass
class EpisodeStep:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    advantage: float


def masked_policy(actor: MlpParams, state: np.ndarray):
    """Action probabilities over positions still frozen in `state`.

    Returns (probs, cache, allowed mask); selected positions carry
    exactly zero probability.
    """
    state = np.asarray(state, dtype=np.float64)
    logits, cache = mlp_forward(actor, state)
    allowed = state < 0.5
    if not allowed.any():
        raise ValueError("no frozen positions left to select")
    shifted = logits - logits[allowed].max()
    weights = np.where(allowed, np.exp(shifted), 0.0)
    return weights / weights.sum(), cache, allowed


def advantage(reward: float, gamma: float, v_next: float, v_cur: float) -> float:
    return reward + gamma * v_next - v_cur


def _log_prob_grad(probs: np.ndarray, allowed: np.ndarray, action: int) -> np.ndarray:
    """d log pi(action) / d logits for the masked softmax."""
    grad = -probs
    grad[action] += 1.0
    grad[~allowed] = 0.0
    return grad


class A2cTrainer:
    """Holds actor/critic parameters and applies mini-batched updates."""

    def __init__(self, cfg: A2cConfig, reward_fn):
        self.cfg = cfg
        self.reward_fn = reward_fn
        self.actor = cfg.make_actor()
        self.critic = cfg.make_critic()
        self.actor_state = AdamState.init(self.actor, cfg.actor_lr)
        self.critic_state = AdamState.init(self.critic, cfg.critic_lr)
        self.rng = np.random.default_rng(derive_seed(cfg.seed, "a2c-sample"))
        self._pending: list[tuple] = []

    def step(self, state: np.ndarray) -> EpisodeStep:
        """Sample an action, evaluate the reward, queue the update.

        The recorded reward is the raw log BLER; the advantage (and both
        network updates) use its negation, so that improving the code is
        what gets reinforced. The critic therefore estimates discounted
        future negated log BLER.
        """
        cfg = self.cfg
        probs, actor_cache, allowed = masked_policy(self.actor, state)
        action = int(self.rng.choice(cfg.n, p=probs))
        next_state = state.copy()
        next_state[action] = 1.0
        reward = self.reward_fn(next_state)
        v_cur, critic_cache = mlp_forward(self.critic, state)
        v_next, _ = mlp_forward(self.critic, next_state)
        adv = advantage(-reward, cfg.gamma, float(v_next[0]), float(v_cur[0]))
        self._pending.append((probs, allowed, action, adv, actor_cache,
                              critic_cache))
        if len(self._pending) >= cfg.batch_size:
            self.flush()
        return EpisodeStep(state.copy(), action, reward, next_state, adv)

    def flush(self) -> None:
        """Apply the accumulated actor/critic gradients as one Adam step each."""
        if not self._pending:
            return
        scale = 1.0 / len(self._pending)
        a_grads = c_grads = None
        for probs, allowed, action, adv, a_cache, c_cache in self._pending:
            dlogits = -adv * _log_prob_grad(probs, allowed, action) * scale
            ga = mlp_backward(self.actor, a_cache, dlogits)
            gc = mlp_backward(self.critic, c_cache, np.array([-adv * scale]))
            if a_grads is None:
                a_grads, c_grads = ga, gc
            else:
                for acc, new in ((a_grads, ga), (c_grads, gc)):
                    for dst, src in zip(acc[0], new[0]):
                        dst += src
                    for dst, src in zip(acc[1], new[1]):
                        dst += src
        adam_step(self.actor, a_grads, self.actor_state)
        adam_step(self.critic, c_grads, self.critic_state)
        self._pending.clear()

    def initial_state(self) -> np.ndarray:
        s = np.zeros(self.cfg.n)
        s[self.cfg.preset_indices()] = 1.0
        return s

    def greedy_sequence(self) -> list[int]:
        """Presets plus argmax rollout of the trained actor."""
        seq = list(self.cfg.preset_indices())
        state = self.initial_state()
        while int(state.sum()) < self.cfg.k_high:
            probs, _, _ = masked_policy(self.actor, state)
            action = int(np.argmax(probs))
            seq.append(action)
            state[action] = 1.0
        return seq


def a2c_step(actor: MlpParams, critic: MlpParams, state: np.ndarray,
             cfg: A2cConfig, rng, reward_fn,
             actor_state: AdamState, critic_state: AdamState) -> EpisodeStep:
    """Single transition with an immediate (batch of one) update."""
    probs, actor_cache, allowed = masked_policy(actor, state)
    action = int(rng.choice(cfg.n, p=probs))
    next_state = np.asarray(state, dtype=np.float64).copy()
    if next_state[action] >= 0.5:
        raise ValueError("sampled an already selected position")
    next_state[action] = 1.0
    reward = reward_fn(next_state)
    v_cur, critic_cache = mlp_forward(critic, state)
    v_next, _ = mlp_forward(critic, next_state)
    adv = advantage(reward, cfg.gamma, float(v_next[0]), float(v_cur[0]))
    dlogits = -adv * _log_prob_grad(probs, allowed, action)
    adam_step(actor, mlp_backward(actor, actor_cache, dlogits), actor_state)
    adam_step(critic, mlp_backward(critic, critic_cache, np.array([-adv])),
              critic_state)
    return EpisodeStep(np.asarray(state, dtype=np.float64).copy(), action,
                       reward, next_state, adv)


@dataclass
class A2cResult:
    sequence: list
    trace: list


def state_info_set(state: np.ndarray) -> tuple:
    return tuple(int(i) for i in np.nonzero(np.asarray(state) >= 0.5)[0])


def run_a2c(cfg: A2cConfig, decoder: evaluate.DecoderSpec,
            budget: evaluate.EvalBudget, episodes: int,
            workers: int = 1) -> A2cResult:
    """Train over full episodes and return the greedy nested sequence.

    Each step's recorded reward is ln BLER of the grown construction at
    the configured SNR, cached per information set; updates reinforce
    its negation (lower BLER is better). Trace rows are
    (episode, step, action, reward, advantage).
    """
    cache: dict[tuple, float] = {}

    def reward_fn(state: np.ndarray) -> float:
        info = state_info_set(state)
        if info not in cache:
            label = ",".join(str(i) for i in info)
            sub = evaluate.EvalBudget(derive_seed(cfg.seed, f"a2c-eval:{label}"),
                                      budget.min_error_events, budget.max_frames,
                                      budget.batch_frames)
            est = evaluate.estimate_bler(PolarCode(cfg.n, info), decoder,
                                         cfg.esn0_db, sub, workers)
            cache[info] = evaluate.reward("log_bler", est)
        return cache[info]

    trainer = A2cTrainer(cfg, reward_fn)
    trace: list[tuple] = []
    for episode in range(episodes):
        state = trainer.initial_state()
        for t in range(cfg.steps_per_episode()):
            step = trainer.step(state)
            trace.append((episode, t, step.action, step.reward, step.advantage))
            state = step.next_state
    trainer.flush()
    return A2cResult(trainer.greedy_sequence(), trace)


A2C_TRACE_FIELDS = ["episode", "step", "action", "reward", "advantage"]


def write_a2c_trace_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(A2C_TRACE_FIELDS)
        for episode, step, action, reward, adv in trace:
            writer.writerow([episode, step, action, repr(float(reward)),
                             repr(float(adv))])


def save_sequence(path, n: int, k_low: int, k_high: int, sequence) -> None:
    """Write "N K_low K_high" then the ordered indices, most reliable first."""
    with open(path, "w") as fh:
        fh.write(f"{n} {k_low} {k_high}\n")
        fh.write(" ".join(str(int(i)) for i in sequence) + "\n")


def load_sequence(path) -> tuple[int, int, int, list]:
    with open(path) as fh:
        n, k_low, k_high = (int(v) for v in fh.readline().split())
        seq = [int(v) for v in fh.readline().split()]
    return n, k_low, k_high, seq
