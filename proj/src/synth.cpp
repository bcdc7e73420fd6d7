#include "memlens/synth.hpp"

#include "memlens/error.hpp"
#include "memlens/parallel.hpp"
#include "memlens/random.hpp"

#include <cmath>
#include <random>
#include <span>
#include <string>

namespace memlens {

std::string_view to_string(EnvKind kind) noexcept {
    switch (kind) {
        case EnvKind::markov: return "markov";
        case EnvKind::parity: return "parity";
        case EnvKind::delayed_cue: return "delayed_cue";
        case EnvKind::noisy_copy: return "noisy_copy";
    }
    return "?";
}

std::optional<EnvKind> parse_env_kind(std::string_view name) noexcept {
    for (auto k : {EnvKind::markov, EnvKind::parity, EnvKind::delayed_cue, EnvKind::noisy_copy})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

std::string_view env_kind_names() noexcept { return "markov, parity, delayed_cue, noisy_copy"; }

void validate(const EnvSpec& spec) {
    if (spec.horizon < 1) throw InputError("horizon must be at least 1");
    if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) throw InputError("noise must lie in [0, 1]");
    if (spec.n_obs < 1 || spec.n_actions < 1) throw InputError("alphabet sizes must be at least 1");
    if (spec.kind == EnvKind::parity && (spec.n_obs != 2 || spec.n_actions != 2))
        throw InputError("parity needs binary observations and actions");
    if ((spec.kind == EnvKind::delayed_cue || spec.kind == EnvKind::noisy_copy) &&
        spec.n_actions < spec.n_obs)
        throw InputError(std::string(to_string(spec.kind)) + " needs at least as many actions as cue values");
    if (spec.reward_cue && (spec.kind == EnvKind::markov || spec.kind == EnvKind::parity))
        throw InputError("reward_cue applies to delayed_cue and noisy_copy only");
    if (spec.reward_cue && spec.kind == EnvKind::delayed_cue && spec.horizon < 2)
        throw InputError("delayed_cue with reward_cue needs horizon >= 2");
}

namespace {

using Distribution = std::vector<double>;

/// Conditional laws of X_t, A_t and R_t given the episode so far.
class Kernel {
public:
    explicit Kernel(const EnvSpec& spec) : spec_(spec) { validate(spec); }

    std::size_t n_x() const { return spec_.reward_cue ? 1 : spec_.n_obs; }
    std::size_t n_a() const { return spec_.n_actions; }
    std::size_t n_r() const { return spec_.reward_cue ? spec_.n_obs : 1; }

    Distribution observation(std::span<const StepRecord>) const {
        return Distribution(n_x(), 1.0 / static_cast<double>(n_x()));
    }

    Distribution reward(std::span<const StepRecord>) const {
        return Distribution(n_r(), 1.0 / static_cast<double>(n_r()));
    }

    /// prefix holds Z_1..Z_{t-1}; x is X_t.
    Distribution action(std::span<const StepRecord> prefix, Symbol x) const {
        const std::size_t t = prefix.size() + 1;
        const auto uniform = Distribution(n_a(), 1.0 / static_cast<double>(n_a()));
        std::uint32_t target = 0;
        switch (spec_.kind) {
            case EnvKind::markov:
                target = static_cast<std::uint32_t>(x.id % n_a());
                break;
            case EnvKind::parity: {
                std::uint32_t parity = x.id;
                for (const auto& z : prefix) parity ^= z.x.id;
                target = parity & 1u;
                break;
            }
            case EnvKind::delayed_cue:
                if (t < spec_.horizon) return uniform;
                target = t == 1 ? x.id : cue(prefix[0]);
                break;
            case EnvKind::noisy_copy:
                if (t == 1) return uniform;
                target = cue(prefix[t - 2]);
                break;
        }
        Distribution d(n_a(), spec_.noise / static_cast<double>(n_a()));
        d[target] += 1.0 - spec_.noise;
        return d;
    }

private:
    std::uint32_t cue(const StepRecord& z) const { return spec_.reward_cue ? z.r.id : z.x.id; }

    const EnvSpec& spec_;
};

SymbolTable numbered_table(std::size_t n) {
    SymbolTable t;
    for (std::size_t i = 0; i < n; ++i) t.intern(std::to_string(i));
    return t;
}

Symbol draw(const Distribution& d, std::mt19937_64& rng) {
    std::discrete_distribution<std::uint32_t> pick(d.begin(), d.end());
    return Symbol{pick(rng)};
}

void enumerate(const Kernel& kernel, std::size_t horizon, std::vector<StepRecord>& prefix, double p,
               std::vector<WeightedEpisode>& out) {
    if (prefix.size() == horizon) {
        out.push_back(WeightedEpisode{prefix, p});
        return;
    }
    const auto px = kernel.observation(prefix);
    for (std::uint32_t x = 0; x < px.size(); ++x) {
        if (px[x] <= 0.0) continue;
        const auto pa = kernel.action(prefix, Symbol{x});
        for (std::uint32_t a = 0; a < pa.size(); ++a) {
            if (pa[a] <= 0.0) continue;
            const auto pr = kernel.reward(prefix);
            for (std::uint32_t r = 0; r < pr.size(); ++r) {
                if (pr[r] <= 0.0) continue;
                prefix.push_back(StepRecord{Symbol{x}, Symbol{a}, Symbol{r}});
                enumerate(kernel, horizon, prefix, p * px[x] * pa[a] * pr[r], out);
                prefix.pop_back();
            }
        }
    }
}

}  // namespace

TrajectoryDataset generate(const EnvSpec& spec, std::size_t episodes, std::size_t threads) {
    if (episodes < 1) throw InputError("episodes must be at least 1");
    const Kernel kernel(spec);
    std::vector<Trajectory> trajectories(episodes);
    parallel_for(episodes, threads, [&](std::size_t e) {
        std::mt19937_64 rng(derive_seed(spec.seed, e));
        auto& traj = trajectories[e];
        traj.id = "ep" + std::to_string(e);
        traj.steps.reserve(spec.horizon);
        for (std::size_t t = 1; t <= spec.horizon; ++t) {
            const auto x = draw(kernel.observation(traj.steps), rng);
            const auto a = draw(kernel.action(traj.steps, x), rng);
            const auto r = draw(kernel.reward(traj.steps), rng);
            traj.steps.push_back(StepRecord{x, a, r});
        }
    });
    return TrajectoryDataset(std::move(trajectories), numbered_table(kernel.n_x()),
                             numbered_table(kernel.n_a()), numbered_table(kernel.n_r()));
}

JointPolicyModel to_joint_model(const EnvSpec& spec) {
    const Kernel kernel(spec);
    const double n_z = static_cast<double>(kernel.n_x() * kernel.n_a() * kernel.n_r());
    if (std::pow(n_z, static_cast<double>(spec.horizon)) > 1e6)
        throw InputError("joint model too large to enumerate (|Z|^H > 10^6)");
    std::vector<WeightedEpisode> episodes;
    std::vector<StepRecord> prefix;
    enumerate(kernel, spec.horizon, prefix, 1.0, episodes);
    return JointPolicyModel(spec.horizon, numbered_table(kernel.n_x()), numbered_table(kernel.n_a()),
                            numbered_table(kernel.n_r()), std::move(episodes), 1e-12);
}

}  // namespace memlens
