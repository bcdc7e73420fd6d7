#pragma once

#include "memlens/capacity.hpp"
#include "memlens/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace memlens {

/// Toy policies with known memory use.
///   markov       X_t uniform, A_t = X_t mod |A|
///   parity       X_t uniform binary, A_t = X_1 xor ... xor X_t
///   delayed_cue  A_t uniform for t < H, A_H = X_1
///   noisy_copy   A_1 uniform, A_t = X_{t-1}
/// With probability `noise` any target action is replaced by a uniform draw.
enum class EnvKind { markov, parity, delayed_cue, noisy_copy };

std::string_view to_string(EnvKind kind) noexcept;
std::optional<EnvKind> parse_env_kind(std::string_view name) noexcept;
/// "markov, parity, delayed_cue, noisy_copy"
std::string_view env_kind_names() noexcept;

struct EnvSpec {
    EnvKind kind = EnvKind::markov;
    std::size_t horizon = 5;
    double noise = 0.0;
    std::size_t n_obs = 2;
    std::size_t n_actions = 2;
    /// delayed_cue / noisy_copy only: observations become the constant "0"
    /// and the cue is carried by the reward R_t instead.
    bool reward_cue = false;
    std::uint64_t seed = 0;
};

/// Throws InputError describing the first violated constraint.
void validate(const EnvSpec& spec);

/// Episodes "ep0", "ep1", ... sampled with per-episode derived seeds, so the
/// result does not depend on `threads`.
TrajectoryDataset generate(const EnvSpec& spec, std::size_t episodes, std::size_t threads = 1);

/// Exact episode distribution of `generate`. Requires |Z|^H <= 10^6.
JointPolicyModel to_joint_model(const EnvSpec& spec);

}  // namespace memlens
