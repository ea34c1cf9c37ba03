#include "ccgeo/supportfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace ccgeo {

SupportField::SupportField(double z_min, double z_max, int n_z, int n_theta)
    : z_min_(z_min), z_max_(z_max), n_z_(n_z), n_theta_(n_theta),
      data_(static_cast<size_t>(n_z) * n_theta, 0.0) {
    if (n_z < 2 || n_theta < 8 || !(z_max > z_min))
        throw std::invalid_argument("SupportField: bad grid");
    z_step_ = (z_max - z_min) / (n_z - 1);
    theta_step_ = 2.0 * M_PI / n_theta;
}

SupportField SupportField::from_callable(double z_min, double z_max, int n_z, int n_theta,
                                         const std::function<double(double, double)>& F) {
    SupportField f(z_min, z_max, n_z, n_theta);
    for (int iz = 0; iz < n_z; ++iz) {
        double z = f.z_of(iz);
        for (int it = 0; it < n_theta; ++it) f.at(iz, it) = F(z, f.theta_of(it));
    }
    return f;
}

double SupportField::eval(double z, double theta) const {
    double tz = (z - z_min_) / z_step_;
    tz = std::fmin(std::fmax(tz, 0.0), n_z_ - 1.000001);
    int iz = static_cast<int>(tz);
    if (iz > n_z_ - 2) iz = n_z_ - 2;
    double az = tz - iz;
    double tt = theta / theta_step_;
    tt -= std::floor(tt / n_theta_) * n_theta_;
    int it = static_cast<int>(tt) % n_theta_;
    double at_ = tt - static_cast<int>(tt);
    int it1 = (it + 1) % n_theta_;
    double v0 = (1 - at_) * at(iz, it) + at_ * at(iz, it1);
    double v1 = (1 - at_) * at(iz + 1, it) + at_ * at(iz + 1, it1);
    return (1 - az) * v0 + az * v1;
}

std::array<double, 2> SupportField::section_point(int iz, int it) const {
    int im = (it + n_theta_ - 1) % n_theta_, ip = (it + 1) % n_theta_;
    int im2 = (it + n_theta_ - 2) % n_theta_, ip2 = (it + 2) % n_theta_;
    double h = at(iz, it);
    // 4th-order central difference; slices are periodic and smooth.
    double dh = (8.0 * (at(iz, ip) - at(iz, im)) - (at(iz, ip2) - at(iz, im2))) /
                (12.0 * theta_step_);
    double c = std::cos(theta_of(it)), s = std::sin(theta_of(it));
    return {h * c - dh * s, h * s + dh * c};
}

double SupportField::point_distance(double x, double y, int iz) const {
    double best = -1e300;
    for (int it = 0; it < n_theta_; ++it) {
        double v = x * std::cos(theta_of(it)) + y * std::sin(theta_of(it)) - at(iz, it);
        if (v > best) best = v;
    }
    return std::fmax(0.0, best);
}

double SupportField::curvature(int iz, int it) const {
    int im = (it + n_theta_ - 1) % n_theta_, ip = (it + 1) % n_theta_;
    double s = std::sin(0.5 * theta_step_);
    double d2 = (at(iz, im) - 2.0 * at(iz, it) + at(iz, ip)) / (4.0 * s * s);
    return at(iz, it) + d2;
}

double SupportField::z_second_difference(int iz, int it) const {
    if (iz <= 0 || iz >= n_z_ - 1)
        throw std::out_of_range("z_second_difference: interior rows only");
    return at(iz - 1, it) - 2.0 * at(iz, it) + at(iz + 1, it);
}

SupportField SupportField::scaled_combined(double a, const SupportField& other, double b) const {
    if (other.n_z_ != n_z_ || other.n_theta_ != n_theta_ || other.z_min_ != z_min_ ||
        other.z_max_ != z_max_)
        throw std::invalid_argument("scaled_combined: grid mismatch");
    SupportField out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = a * data_[i] + b * other.data_[i];
    return out;
}

static const char kMagic[4] = {'C', 'C', 'S', 'F'};

void SupportField::save_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    uint32_t ver = 1, nz = n_z_, nt = n_theta_;
    os.write(kMagic, 4);
    os.write(reinterpret_cast<const char*>(&ver), 4);
    os.write(reinterpret_cast<const char*>(&nz), 4);
    os.write(reinterpret_cast<const char*>(&nt), 4);
    os.write(reinterpret_cast<const char*>(&z_min_), 8);
    os.write(reinterpret_cast<const char*>(&z_max_), 8);
    os.write(reinterpret_cast<const char*>(data_.data()), data_.size() * 8);
}

SupportField SupportField::load_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    uint32_t ver, nz, nt;
    double zmin, zmax;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&ver), 4);
    is.read(reinterpret_cast<char*>(&nz), 4);
    is.read(reinterpret_cast<char*>(&nt), 4);
    is.read(reinterpret_cast<char*>(&zmin), 8);
    is.read(reinterpret_cast<char*>(&zmax), 8);
    if (!is || std::memcmp(magic, kMagic, 4) != 0 || ver != 1)
        throw std::runtime_error("bad support field file: " + path);
    SupportField f(zmin, zmax, static_cast<int>(nz), static_cast<int>(nt));
    is.read(reinterpret_cast<char*>(f.data_.data()), f.data_.size() * 8);
    if (!is) throw std::runtime_error("truncated support field file: " + path);
    return f;
}

void SupportField::save_csv(std::ostream& os) const {
    os << "z,theta,F\n";
    os.precision(17);
    for (int iz = 0; iz < n_z_; ++iz)
        for (int it = 0; it < n_theta_; ++it)
            os << z_of(iz) << ',' << theta_of(it) << ',' << at(iz, it) << '\n';
}

void SupportField::save_obj(std::ostream& os, int z_stride, int theta_stride) const {
    os.precision(9);
    int rows = 0;
    int cols = 0;
    for (int it = 0; it < n_theta_; it += theta_stride) ++cols;
    for (int iz = 0; iz < n_z_; iz += z_stride) {
        ++rows;
        for (int it = 0; it < n_theta_; it += theta_stride) {
            auto p = section_point(iz, it);
            os << "v " << p[0] << ' ' << p[1] << ' ' << z_of(iz) << '\n';
            // Outward normal of the support surface: the plane <x,dir> = F
            // touches at this vertex, so n ~ (cos t, sin t, -dF/dz).
            int jm = std::max(0, iz - 1), jp = std::min(n_z_ - 1, iz + 1);
            double fz = (at(jp, it) - at(jm, it)) / ((jp - jm) * z_step_);
            double c = std::cos(theta_of(it)), s = std::sin(theta_of(it));
            double norm = std::sqrt(1.0 + fz * fz);
            os << "vn " << c / norm << ' ' << s / norm << ' ' << -fz / norm << '\n';
        }
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            int c1 = (c + 1) % cols;
            int a = r * cols + c + 1, b = r * cols + c1 + 1;
            int d = (r + 1) * cols + c + 1, e = (r + 1) * cols + c1 + 1;
            os << "f " << a << "//" << a << ' ' << b << "//" << b << ' ' << e << "//" << e
               << ' ' << d << "//" << d << '\n';
        }
    }
}

Certificate z_convexity_certificate(const SupportField& f, double z_window, double tol) {
    Certificate cert;
    cert.name = "z_convexity";
    cert.pass = true;
    double worst = 1e300;
    int wz = -1, wt = -1;
    for (int iz = 1; iz + 1 < f.n_z(); ++iz) {
        if (std::fabs(f.z_of(iz)) > z_window) continue;
        for (int it = 0; it < f.n_theta(); ++it) {
            double d2 = f.z_second_difference(iz, it);
            if (d2 < worst) {
                worst = d2;
                wz = iz;
                wt = it;
            }
        }
    }
    if (worst < -tol) {
        cert.pass = false;
        cert.witness =
            "z=" + std::to_string(f.z_of(wz)) + " theta=" + std::to_string(f.theta_of(wt));
    }
    cert.margin = worst;
    cert.details = {{"min_second_difference", worst}, {"tol", tol}, {"z_window", z_window}};
    return cert;
}

Certificate curvature_certificate(const SupportField& f, double z_window, double min_curvature) {
    Certificate cert;
    cert.name = "section_curvature";
    cert.pass = true;
    double worst = 1e300;
    int wz = -1, wt = -1;
    for (int iz = 0; iz < f.n_z(); ++iz) {
        if (std::fabs(f.z_of(iz)) > z_window) continue;
        for (int it = 0; it < f.n_theta(); ++it) {
            double r = f.curvature(iz, it);
            if (r < worst) {
                worst = r;
                wz = iz;
                wt = it;
            }
        }
    }
    if (!(worst > min_curvature)) {
        cert.pass = false;
        cert.witness =
            "z=" + std::to_string(f.z_of(wz)) + " theta=" + std::to_string(f.theta_of(wt));
    }
    cert.margin = worst;
    cert.details = {{"min_curvature", worst}, {"required", min_curvature}, {"z_window", z_window}};
    return cert;
}

}  // namespace ccgeo
