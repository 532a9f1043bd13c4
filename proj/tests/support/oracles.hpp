#pragma once

// Independent reference implementations used to freeze expected values.
// Nothing here may call into the code paths it checks.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mva/geometry/camera.hpp"

namespace oracle {

// Two-view triangulation as the midpoint of the shortest segment between
// the two viewing rays; independent of any DLT/SVD machinery.
inline Eigen::Vector3d midpoint_triangulate(const mva::geom::CameraPose& a,
                                            const Eigen::Vector2d& xa,
                                            const mva::geom::CameraPose& b,
                                            const Eigen::Vector2d& xb) {
    auto ray = [](const mva::geom::CameraPose& p, const Eigen::Vector2d& x) {
        const Eigen::Vector3d dir_cam = p.intrinsics.inverse() * Eigen::Vector3d(x.x(), x.y(), 1.0);
        return Eigen::Vector3d(p.rotation.transpose() * dir_cam.normalized());
    };
    const Eigen::Vector3d ca = a.center(), cb = b.center();
    const Eigen::Vector3d da = ray(a, xa), db = ray(b, xb);
    // Solve [da -db][s t]' = cb - ca in least squares.
    Eigen::Matrix<double, 3, 2> m;
    m.col(0) = da;
    m.col(1) = -db;
    const Eigen::Vector2d st = m.colPivHouseholderQr().solve(cb - ca);
    return 0.5 * (ca + st.x() * da + cb + st.y() * db);
}

// One-directional point-to-epipolar-line distances written out longhand.
inline double naive_line_distance(const Eigen::Matrix3d& f, const Eigen::Vector2d& xa,
                                  const Eigen::Vector2d& xb) {
    const double la = f(0, 0) * xa.x() + f(0, 1) * xa.y() + f(0, 2);
    const double lb = f(1, 0) * xa.x() + f(1, 1) * xa.y() + f(1, 2);
    const double lc = f(2, 0) * xa.x() + f(2, 1) * xa.y() + f(2, 2);
    const double num = std::abs(la * xb.x() + lb * xb.y() + lc);
    return num / std::sqrt(la * la + lb * lb);
}

// Central finite differences for a scalar function of a flat vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (int i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        xp[i] = orig + h;
        const double fp = f(xp);
        xp[i] = orig - h;
        const double fm = f(xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Central finite differences for a vector-valued function: returns the
// Jacobian row-by-row.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd j(f0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (int i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        xp[i] = orig + h;
        const Eigen::VectorXd fp = f(xp);
        xp[i] = orig - h;
        const Eigen::VectorXd fm = f(xp);
        xp[i] = orig;
        j.col(i) = (fp - fm) / (2.0 * h);
    }
    return j;
}

inline double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

// All partitions of {0..n-1} (restricted growth strings); n <= 10 or so.
inline std::vector<std::vector<int>> all_partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> labels(n, 0);
    std::function<void(int, int)> rec = [&](int i, int max_used) {
        if (i == n) {
            out.push_back(labels);
            return;
        }
        for (int l = 0; l <= max_used + 1; ++l) {
            labels[i] = l;
            rec(i + 1, std::max(max_used, l));
        }
    };
    rec(0, -1);
    return out;
}

}  // namespace oracle
