#include "lipfree/bases.hpp"

#include <cmath>
#include <random>

namespace lipfree {

namespace {

SpacePtr share(PMetricSpace s) { return std::make_shared<const PMetricSpace>(std::move(s)); }

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

MatrixD retraction_projection(std::size_t m, std::size_t k, std::size_t j) {
    if (k > j || j > m) throw StructuralError("need k <= j <= m");
    MatrixD out(m, m);
    for (std::size_t n = 1; n <= m; ++n) {
        const std::size_t r = std::max(k, std::min(n, j));
        if (r > 0) out(r - 1, n - 1) += 1.0;
        if (k > 0) out(k - 1, n - 1) -= 1.0;
    }
    return out;
}

BasisSystem natural_basis(std::size_t m, double p) {
    if (m < 1) throw StructuralError("natural basis needs m >= 1");
    BasisSystem sys;
    sys.kind = BasisKind::natural_N;
    sys.ambient = share(integer_segment(m, p));
    for (std::size_t n = 1; n <= m; ++n) {
        std::vector<double> x(m, 0.0);
        x[n - 1] = 1.0;
        if (n > 1) x[n - 2] = -1.0;
        sys.vectors.push_back(std::move(x));
    }
    for (std::size_t j = 0; j <= m; ++j)
        sys.projections.emplace_back(sys.ambient, sys.ambient, retraction_projection(m, 0, j));
    return sys;
}

namespace {

std::vector<double> sorted_grid(std::vector<double> pts) {
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace

FreeOperator interval_projection(const std::vector<double>& K1, const std::vector<double>& K2, double p) {
    const auto a = sorted_grid(K1), b = sorted_grid(K2);
    auto dom = share(custom_grid(a, p));
    auto cod = share(custom_grid(b, p));
    return FreeOperator(dom, cod, interval_projection_matrix(a, b));
}

FreeOperator grid_embedding(const std::vector<double>& K1, const std::vector<double>& K2, double p) {
    const auto a = sorted_grid(K1), b = sorted_grid(K2);
    auto dom = share(custom_grid(b, p));
    auto cod = share(custom_grid(a, p));
    return FreeOperator(dom, cod, grid_embedding_matrix(a, b));
}

BasisSystem haar_system(std::size_t N, double p, std::size_t cap) {
    if (N > cap) throw ResourceError("Haar level " + std::to_string(N) + " exceeds the cap " + std::to_string(cap));
    BasisSystem sys;
    sys.kind = BasisKind::haar_dyadic;
    sys.ambient = share(dyadic_grid(N, p));
    const auto D = dyadic_points(N);
    const std::size_t dim = D.size() - 1;
    const std::size_t top = std::size_t{1} << N;

    sys.haar.push_back(HaarTerm{-1, 0.0, 1.0, 0.5, 0, top, 0});
    for (std::size_t level = 0; level < N; ++level) {
        const std::size_t width = top >> level;
        for (std::size_t k = 0; k < (std::size_t{1} << level); ++k) {
            HaarTerm h;
            h.level = static_cast<int>(level);
            h.ia = k * width;
            h.ib = h.ia + width;
            h.ic = h.ia + width / 2;
            h.a = D[h.ia];
            h.b = D[h.ib];
            h.c = D[h.ic];
            sys.haar.push_back(h);
        }
    }

    for (const auto& h : sys.haar) {
        std::vector<double> v(dim, 0.0);
        auto add = [&](std::size_t i, double c) {
            if (i > 0) v[i - 1] += c;
        };
        if (h.level < 0) {
            add(h.ib, 1.0);
            add(h.ia, -1.0);
        } else {
            add(h.ia, 1.0);
            add(h.ib, 1.0);
            add(h.ic, -2.0);
        }
        sys.vectors.push_back(std::move(v));
    }

    sys.projections.emplace_back(sys.ambient, sys.ambient, MatrixD(dim, dim));
    std::vector<double> K{0.0, 1.0};
    for (std::size_t j = 0; j < sys.haar.size(); ++j) {
        if (sys.haar[j].level >= 0) K.insert(std::lower_bound(K.begin(), K.end(), sys.haar[j].c), sys.haar[j].c);
        sys.projections.emplace_back(sys.ambient, sys.ambient,
                                     grid_embedding_matrix(D, K) * interval_projection_matrix(D, K));
    }
    return sys;
}

BasisCheck check_basis(const BasisSystem& system) {
    BasisCheck out;
    const auto& P = system.projections;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j)
            out.composition =
                std::max(out.composition, max_abs_diff(P[i].matrix() * P[j].matrix(), P[std::min(i, j)].matrix()));
    for (std::size_t j = 0; j < P.size(); ++j)
        for (std::size_t n = 0; n < system.vectors.size(); ++n) {
            const auto image = P[j].matrix().apply(system.vectors[n]);
            if (n < j) {
                std::vector<double> diff(image.size());
                for (std::size_t r = 0; r < image.size(); ++r) diff[r] = image[r] - system.vectors[n][r];
                out.reproduction = std::max(out.reproduction, max_abs(diff));
            } else {
                out.annihilation = std::max(out.annihilation, max_abs(image));
            }
        }
    return out;
}

BasisConstant basis_constant(const BasisSystem& system, bool bimonotone) {
    BasisConstant out;
    for (std::size_t j = 0; j < system.projections.size(); ++j) {
        const double v = operator_norm(system.projections[j]).value;
        if (v > out.value) {
            out.value = v;
            out.index = j;
        }
    }
    if (!bimonotone) return out;
    for (std::size_t j = 1; j < system.projections.size(); ++j)
        for (std::size_t k = 0; k < j; ++k) {
            const FreeOperator diff(system.ambient, system.ambient,
                                    system.projections[j].matrix() - system.projections[k].matrix());
            const double v = operator_norm(diff).value;
            if (v > out.bimonotone) {
                out.bimonotone = v;
                out.bimonotone_k = k;
                out.bimonotone_j = j;
            }
        }
    return out;
}

std::vector<ConditionalityRow> conditionality_witness(std::size_t m_max, double p) {
    std::vector<ConditionalityRow> rows;
    for (std::size_t m = 1; m <= m_max; ++m) {
        const auto seg = integer_segment(m, p);
        std::vector<double> sum(m, 0.0), alt(m, 0.0);
        sum[m - 1] = 1.0;
        for (std::size_t n = 1; n <= m; ++n) {
            const double sign = n % 2 ? -1.0 : 1.0;
            alt[n - 1] += sign;
            if (n > 1) alt[n - 2] -= sign;
        }
        ConditionalityRow row;
        row.m = m;
        row.sum_norm = norm_value(seg, sum);
        row.lp_aggregate = std::pow(static_cast<double>(m), 1.0 / p);
        row.alternating = norm_value(seg, alt);
        row.ratio = row.alternating / row.sum_norm;
        rows.push_back(row);
    }
    return rows;
}

BridgeReport scaling_bridge(std::size_t N, double p, std::size_t samples, std::uint64_t seed) {
    const auto dy = dyadic_grid(N, p);
    const std::size_t top = std::size_t{1} << N;
    const auto seg = integer_segment(top, p);
    const double scale = std::ldexp(1.0, -static_cast<int>(N));

    std::vector<std::vector<double>> deltas;
    for (std::size_t x = 0; x <= top; ++x)
        for (std::size_t y = x + 1; y <= top; ++y) {
            std::vector<double> d(top, 0.0);
            d[y - 1] = 1.0;
            if (x > 0) d[x - 1] = -1.0;
            deltas.push_back(std::move(d));
        }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> d(top);
        for (double& v : d) v = u(rng);
        deltas.push_back(std::move(d));
    }

    std::vector<double> err(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t i) {
        const double a = norm_value(dy, deltas[i]);
        const double b = scale * norm_value(seg, deltas[i]);
        err[i] = std::abs(a - b) / std::max(std::abs(b), 1e-300);
    });
    BridgeReport out;
    out.samples = deltas.size();
    for (double e : err) out.max_relative_error = std::max(out.max_relative_error, e);
    return out;
}

}  // namespace lipfree
