#pragma once

#include <cstddef>
#include <variant>

#include "freewalk/word.hpp"

namespace freewalk {

/// Deformation parameter, strictly inside (0, 1).
class QParam {
public:
    explicit QParam(double q);
    double value() const noexcept { return q_; }
    friend bool operator==(QParam, QParam) = default;

private:
    double q_;
};

/// Evaluation at q -> 1, where q-integers become ordinary integers.
struct ClassicalLimit {};
inline constexpr ClassicalLimit classical_limit{};

struct DimValue {
    double linear; ///< may overflow to +inf
    double log;

    static DimValue from_log(double lg);
};

DimValue q_int(std::size_t n, QParam q);
DimValue q_int(std::size_t n, ClassicalLimit);

DimValue dim_q(const Word& w, QParam q);
DimValue dim_q(const Word& w, ClassicalLimit);

inline double log_dim_q(const Word& w, QParam q) { return dim_q(w, q).log; }
/// dim of the carrier space in the q -> 1 model.
std::size_t dim_min(const Word& w);

struct GenericTail {
    Word head; ///< stabilizing head z1 of z = z1 ⊗ z2
};
struct AlternatingTail {
    Letter start;
};
using TailSpec = std::variant<GenericTail, AlternatingTail>;

/// lim_n dim_q(x[z]_n) / dim_q(y[z]_n).
double martin_ratio_limit(const Word& x, const Word& y, const TailSpec& tail, QParam q);
double log_martin_ratio_limit(const Word& x, const Word& y, const TailSpec& tail, QParam q);

} // namespace freewalk
