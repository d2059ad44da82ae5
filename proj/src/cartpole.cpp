#include <algorithm>
#include <cmath>
#include <limits>

#include "domcx/domains.hpp"
#include "domcx/error.hpp"
#include "domcx/rng.hpp"

namespace domcx {

void CartpoleConfig::validate() const {
    if (!(force_mag > 0.0)) throw InvalidArgument("cartpole: force_mag must be > 0");
    if (!(gravity > 0.0) || !(cart_mass > 0.0) || !(pole_mass > 0.0) || !(pole_half_length > 0.0)) {
        throw InvalidArgument("cartpole: gravity, masses and pole length must be > 0");
    }
    if (!(dt > 0.0)) throw InvalidArgument("cartpole: dt must be > 0");
    if (!(angle_limit > 0.0) || !(position_limit > 0.0)) throw InvalidArgument("cartpole: limits must be > 0");
    if (max_steps == 0) throw InvalidArgument("cartpole: max_steps must be >= 1");
    if (episodes == 0) throw InvalidArgument("cartpole: episodes must be >= 1");
}

CartpoleState cartpole_step(const CartpoleState& s, double force, const CartpoleConfig& c) noexcept {
    const double total_mass = c.cart_mass + c.pole_mass;
    const double polemass_length = c.pole_mass * c.pole_half_length;
    const double sin_t = std::sin(s.theta);
    const double cos_t = std::cos(s.theta);

    const double temp = (force + polemass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
    const double theta_acc = (c.gravity * sin_t - cos_t * temp) /
                             (c.pole_half_length * (4.0 / 3.0 - c.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

    return CartpoleState{
        s.x + c.dt * s.x_dot,
        s.x_dot + c.dt * x_acc,
        s.theta + c.dt * s.theta_dot,
        s.theta_dot + c.dt * theta_acc,
    };
}

CartpoleState mirror(const CartpoleState& s) noexcept { return {-s.x, -s.x_dot, -s.theta, -s.theta_dot}; }

int cartpole_controller(const CartpoleState& s) noexcept {
    return s.theta + 0.5 * s.theta_dot + 0.05 * s.x_dot > 0.0 ? 1 : 0;
}

bool cartpole_terminal(const CartpoleState& s, const CartpoleConfig& c) noexcept {
    return std::abs(s.theta) > c.angle_limit || std::abs(s.x) > c.position_limit;
}

TaskDataset cartpole_dataset(const CartpoleConfig& config, double test_fraction) {
    config.validate();
    constexpr std::size_t kDims = 4;
    std::vector<double> features;
    std::vector<int> labels;
    std::uniform_real_distribution<double> reset(-0.05, 0.05);

    for (std::size_t episode = 0; episode < config.episodes; ++episode) {
        Rng rng(derive_seed(config.seed, {0xca27u, episode}));
        CartpoleState s{reset(rng), reset(rng), reset(rng), reset(rng)};
        for (std::size_t step = 0; step < config.max_steps && !cartpole_terminal(s, config); ++step) {
            const int action = cartpole_controller(s);
            features.insert(features.end(), {s.x, s.x_dot, s.theta, s.theta_dot});
            labels.push_back(action);
            s = cartpole_step(s, action == 1 ? config.force_mag : -config.force_mag, config);
            if (!std::isfinite(s.x) || !std::isfinite(s.theta)) break;
        }
    }
    if (labels.empty()) throw GenerationError("cartpole: controller produced no samples");

    for (std::size_t d = 0; d < kDims; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = d; i < features.size(); i += kDims) {
            lo = std::min(lo, features[i]);
            hi = std::max(hi, features[i]);
        }
        const double span = hi - lo;
        for (std::size_t i = d; i < features.size(); i += kDims) {
            features[i] = span > 0.0 ? (features[i] - lo) / span : 0.0;
        }
    }
    return TaskDataset::with_random_split("cartpole", kDims, std::move(features), std::move(labels), 2,
                                          test_fraction, derive_seed(config.seed, {0x5b1u}));
}

}  // namespace domcx
