#include "latsym/flow/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "latsym/errors.hpp"

namespace latsym::flow {

namespace {

template <class F>
Point rk4(const F& v, Point y, double lambda, int steps, double blowup) {
    const double h = lambda / steps;
    auto add = [](const Point& a, const Point& k, double s) {
        return Point{a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2]};
    };
    for (int i = 0; i < steps; ++i) {
        const Point k1 = v(y[0], y[1], y[2]);
        const Point y2 = add(y, k1, h / 2);
        const Point k2 = v(y2[0], y2[1], y2[2]);
        const Point y3 = add(y, k2, h / 2);
        const Point k3 = v(y3[0], y3[1], y3[2]);
        const Point y4 = add(y, k3, h);
        const Point k4 = v(y4[0], y4[1], y4[2]);
        for (std::size_t d = 0; d < 3; ++d) {
            y[d] += h / 6 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
            if (!std::isfinite(y[d]) || std::abs(y[d]) > blowup) {
                throw NumericalError("flow blew up at group parameter " + std::to_string(h * (i + 1)) +
                                     " (|coordinate| > " + std::to_string(blowup) + ")");
            }
        }
    }
    return y;
}

template <class F>
FlowPoint integrate(const F& v, const Point& p, const FlowOptions& opts) {
    if (opts.substeps < 4) throw std::invalid_argument("flow needs at least 4 substeps");
    if (opts.lambda == 0.0) return {p, 0.0};
    FlowPoint out;
    out.value = rk4(v, p, opts.lambda, opts.substeps, opts.blowup);
    if (opts.richardson) {
        const Point coarse = rk4(v, p, opts.lambda, opts.substeps / 2, opts.blowup);
        for (std::size_t d = 0; d < 3; ++d) {
            out.error_estimate = std::max(out.error_estimate, std::abs(out.value[d] - coarse[d]) / 15.0);
        }
    }
    return out;
}

template <class F>
TransformResult transform(const F& v, const lattice::GridSolution& g, const lattice::Scheme& s,
                          const FlowOptions& opts) {
    TransformResult out;
    out.grid = g;
    const auto& w = g.window();
    for (int n = w.n_lo; n <= w.n_hi; ++n) {
        for (int m = w.m_lo; m <= w.m_hi; ++m) {
            try {
                auto r = integrate(v, g.at(m, n), opts);
                out.grid.at(m, n) = r.value;
                out.max_error_estimate = std::max(out.max_error_estimate, r.error_estimate);
            } catch (const NumericalError& e) {
                throw NumericalError("site (" + std::to_string(m) + "," + std::to_string(n) + "): " + e.what());
            }
        }
    }
    out.max_residuals = lattice::max_residuals(s, out.grid);
    for (double r : out.max_residuals) out.max_residual = std::max(out.max_residual, r);
    return out;
}

}  // namespace

FlowPoint integrate_flow(const FieldFunction& v, const Point& p, const FlowOptions& opts) {
    return integrate(v, p, opts);
}

FlowPoint integrate_flow(const symmetry::VectorField& v, const Point& p, const FlowOptions& opts) {
    return integrate(v, p, opts);
}

TransformResult transform_and_verify(const FieldFunction& v, const lattice::GridSolution& g, const lattice::Scheme& s,
                                     const FlowOptions& opts) {
    return transform(v, g, s, opts);
}

TransformResult transform_and_verify(const symmetry::VectorField& v, const lattice::GridSolution& g,
                                     const lattice::Scheme& s, const FlowOptions& opts) {
    return transform(v, g, s, opts);
}

}  // namespace latsym::flow
