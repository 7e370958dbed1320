#include "filterstab/belief.hpp"

#include "filterstab/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace filterstab {

Belief Belief::from_probabilities(std::vector<double> probs) {
    if (probs.empty())
        throw std::invalid_argument("belief must have at least one entry");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]) || probs[i] < 0.0)
            throw std::invalid_argument("belief entry " + std::to_string(i) +
                                        " is negative or not finite");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > kStochasticTolerance)
        throw std::invalid_argument("belief entries sum to " + std::to_string(total) +
                                    ", expected 1");
    return Belief(std::move(probs));
}

Belief Belief::normalized(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("belief weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("belief weights have zero total mass");
    for (double& w : weights)
        w /= total;
    return Belief(std::move(weights));
}

Belief Belief::point_mass(std::size_t num_states, StateIndex x) {
    if (x >= num_states)
        throw std::out_of_range("point mass state index out of range");
    std::vector<double> p(num_states, 0.0);
    p[x] = 1.0;
    return Belief(std::move(p));
}

Belief Belief::uniform(std::size_t num_states) {
    if (num_states == 0)
        throw std::invalid_argument("belief must have at least one entry");
    return Belief(std::vector<double>(num_states, 1.0 / static_cast<double>(num_states)));
}

Belief Belief::parse(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParseError("cannot parse belief entry '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw ParseError("cannot parse belief entry '" + item + "'");
        values.push_back(v);
    }
    try {
        return from_probabilities(std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ParseError("bad belief \"" + text + "\": " + e.what());
    }
}

bool Belief::has_full_support() const noexcept {
    for (double p : probs_)
        if (!(p > 0.0))
            return false;
    return true;
}

bool absolutely_continuous(const Belief& mu, const Belief& nu) noexcept {
    if (mu.size() != nu.size())
        return false;
    for (std::size_t x = 0; x < mu.size(); ++x)
        if (nu[x] == 0.0 && mu[x] != 0.0)
            return false;
    return true;
}

void require_absolutely_continuous(const Belief& mu, const Belief& nu) {
    if (mu.size() != nu.size())
        throw std::invalid_argument("priors have different lengths");
    for (std::size_t x = 0; x < mu.size(); ++x)
        if (nu[x] == 0.0 && mu[x] != 0.0)
            throw AbsoluteContinuityError(x);
}

std::string to_string(const Belief& b) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < b.size(); ++i)
        os << (i ? "," : "") << b[i];
    os << ')';
    return os.str();
}

} // namespace filterstab
