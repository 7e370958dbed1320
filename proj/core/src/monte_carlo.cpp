#include "filterstab/monte_carlo.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <stdexcept>

namespace filterstab {

void Moments::merge(const Moments& other) noexcept {
    if (other.count_ == 0)
        return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double n_a = static_cast<double>(count_);
    const double n_b = static_cast<double>(other.count_);
    const double n = n_a + n_b;
    const double delta = other.mean_ - mean_;
    mean_ += delta * n_b / n;
    m2_ += other.m2_ + delta * delta * n_a * n_b / n;
    count_ += other.count_;
}

std::vector<Moments> monte_carlo_moments(std::size_t samples, std::size_t width,
                                         const SampleFn& sample) {
    if (samples == 0)
        throw std::invalid_argument("Monte Carlo needs at least one sample");
    const std::size_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<std::vector<Moments>> partial(blocks, std::vector<Moments>(width));

    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, blocks, 1),
                      [&](const tbb::blocked_range<std::size_t>& range) {
                          std::vector<double> values(width);
                          for (std::size_t b = range.begin(); b != range.end(); ++b) {
                              const std::size_t begin = b * kMonteCarloBlock;
                              const std::size_t end = std::min(samples, begin + kMonteCarloBlock);
                              auto& acc = partial[b];
                              for (std::size_t i = begin; i < end; ++i) {
                                  sample(i, values);
                                  for (std::size_t k = 0; k < width; ++k)
                                      acc[k].add(values[k]);
                              }
                          }
                      });

    std::vector<Moments> total(width);
    for (const auto& block : partial)
        for (std::size_t k = 0; k < width; ++k)
            total[k].merge(block[k]);
    return total;
}

} // namespace filterstab
