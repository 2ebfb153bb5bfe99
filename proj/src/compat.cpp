#include "biofuse/compat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace biofuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Least-squares fit of v = slope * u + intercept.
LineFit fit_line(const std::vector<Point2>& samples) {
    double su = 0, sv = 0, suu = 0, suv = 0;
    for (const auto& s : samples) {
        su += s.x;
        sv += s.y;
        suu += s.x * s.x;
        suv += s.x * s.y;
    }
    const double n = static_cast<double>(samples.size());
    const double denom = n * suu - su * su;
    if (denom == 0.0) return {0.0, sv / n};
    const double slope = (n * suv - su * sv) / denom;
    return {slope, (sv - slope * su) / n};
}

LineFit refine_fit(const std::vector<Point2>& samples, LineFit fit, std::size_t& inlierCount) {
    constexpr double kInlierTolerance = 2.0;
    constexpr std::size_t kMinSamples = 10;
    auto inliers_of = [&](const LineFit& f) {
        std::vector<Point2> in;
        for (const auto& s : samples) {
            if (std::fabs(s.y - (f.slope * s.x + f.intercept)) <= kInlierTolerance) in.push_back(s);
        }
        return in;
    };
    for (int iter = 0; iter < 4; ++iter) {
        const std::vector<Point2> in = inliers_of(fit);
        if (in.size() < kMinSamples) break;
        fit = fit_line(in);
    }
    inlierCount = inliers_of(fit).size();
    return fit;
}

// Edge samples are (u, v) with v the edge coordinate. Corners of a rotated
// region put samples of a neighbouring edge into the run, so several seeds are
// tried (the central third and the runs on either side of the extreme v) and
// the refined line with the most inliers among those within 45 degrees of the
// expected edge direction wins.
LineFit robust_edge_fit(std::vector<Point2> samples, const char* edge) {
    constexpr std::size_t kMinSamples = 10;
    if (samples.size() < kMinSamples) {
        throw Error(ErrorCode::InsufficientEdge,
                    std::string("deskew: only ") + std::to_string(samples.size()) + " samples on " + edge + " edge");
    }
    std::sort(samples.begin(), samples.end(), [](const Point2& a, const Point2& b) { return a.x < b.x; });
    using It = std::vector<Point2>::const_iterator;
    std::vector<std::pair<It, It>> seeds;
    const auto third = static_cast<std::ptrdiff_t>(samples.size() / 3);
    seeds.emplace_back(samples.cbegin() + third, samples.cend() - third);
    const auto byV = [](const Point2& a, const Point2& b) { return a.y < b.y; };
    for (It split : {std::min_element(samples.cbegin(), samples.cend(), byV),
                     std::max_element(samples.cbegin(), samples.cend(), byV)}) {
        seeds.emplace_back(samples.cbegin(), split + 1);
        seeds.emplace_back(split, samples.cend());
    }
    LineFit best;
    std::size_t bestInliers = 0;
    bool bestSteep = true;
    for (const auto& [first, last] : seeds) {
        if (static_cast<std::size_t>(last - first) < kMinSamples) continue;
        std::size_t inliers = 0;
        const LineFit fit = refine_fit(samples, fit_line({first, last}), inliers);
        const bool steep = std::fabs(fit.slope) > 1.0;
        if (bestInliers == 0 || (bestSteep && !steep) || (steep == bestSteep && inliers > bestInliers)) {
            best = fit;
            bestInliers = inliers;
            bestSteep = steep;
        }
    }
    if (bestInliers == 0) best = fit_line(samples);
    return best;
}

double sample_bilinear(const GrayImage& img, double x, double y, double fill) {
    if (x < -0.5 || y < -0.5 || x > img.width - 0.5 || y > img.height - 0.5) return fill;
    const double cx = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    const double top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
    const double bottom = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
    return top * (1 - fy) + bottom * fy;
}

BoundingBox foreground_box(const GrayImage& img, int threshold, std::size_t& count) {
    int minx = img.width, miny = img.height, maxx = -1, maxy = -1;
    count = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y) < threshold) {
                ++count;
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
            }
        }
    }
    if (count == 0) return {};
    return {static_cast<double>(minx), static_cast<double>(miny), static_cast<double>(maxx - minx),
            static_cast<double>(maxy - miny)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Gabor bank

double GaborBankSpec::wavelength(int scale) const {
    return baseWavelength * std::pow(wavelengthRatio, scale);
}

void GaborBankSpec::validate() const {
    if (channel_count() != kDescriptorSize) {
        throw Error(ErrorCode::InvalidArgument,
                    "gabor bank must have orientations x scales x phases = 128 channels, got " +
                        std::to_string(channel_count()));
    }
    if (patchRadius < 1 || !(baseWavelength > 0.0) || !(wavelengthRatio > 1.0) || !(sigmaFactor > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gabor bank parameters out of range");
    }
}

GaborBank::GaborBank(GaborBankSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int r = spec_.patchRadius;
    const std::size_t area = static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
    kernels_.reserve(spec_.channel_count());
    for (double orientation : spec_.orientations) {
        const double c = std::cos(orientation * kDegToRad);
        const double s = std::sin(orientation * kDegToRad);
        for (int scale = 0; scale < spec_.scaleCount; ++scale) {
            const double lambda = spec_.wavelength(scale);
            const double sigma = spec_.sigmaFactor * lambda;
            for (double phase : spec_.phases) {
                std::vector<double> k(area);
                double sum = 0.0;
                std::size_t idx = 0;
                for (int dy = -r; dy <= r; ++dy) {
                    for (int dx = -r; dx <= r; ++dx) {
                        const double along = dx * c + dy * s;
                        const double envelope = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                        k[idx] = envelope * std::cos(2.0 * std::numbers::pi * along / lambda + phase);
                        sum += k[idx];
                        ++idx;
                    }
                }
                const double mean = sum / static_cast<double>(area);
                for (double& v : k) v -= mean;
                kernels_.push_back(std::move(k));
            }
        }
    }
}

Descriptor GaborBank::describe(const GrayImage& image, double x, double y) const {
    image.validate();
    if (!(x >= 0.0) || !(y >= 0.0) || x > image.width - 1 || y > image.height - 1) {
        throw Error(ErrorCode::OutOfBounds, "gabor descriptor: (" + std::to_string(x) + ", " +
                                                std::to_string(y) + ") outside image");
    }
    const int cx = static_cast<int>(std::lround(x));
    const int cy = static_cast<int>(std::lround(y));
    const int r = spec_.patchRadius;
    std::vector<double> patch;
    patch.reserve(static_cast<std::size_t>(side()) * static_cast<std::size_t>(side()));
    for (int dy = -r; dy <= r; ++dy) {
        const int py = std::clamp(cy + dy, 0, image.height - 1);
        for (int dx = -r; dx <= r; ++dx) {
            const int px = std::clamp(cx + dx, 0, image.width - 1);
            patch.push_back(static_cast<double>(image.at(px, py)));
        }
    }
    Descriptor out{};
    for (std::size_t ch = 0; ch < kernels_.size(); ++ch) {
        const auto& k = kernels_[ch];
        double acc = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) acc += k[i] * patch[i];
        out[ch] = acc;
    }
    return out;
}

Descriptor gabor_keydescriptor(const GrayImage& image, double x, double y, const GaborBankSpec& spec) {
    return GaborBank(spec).describe(image, x, y);
}

// ---------------------------------------------------------------------------
// Normalization

FeaturePoint min_max_normalize(const FeaturePoint& p) {
    if (!p.descriptor) throw Error(ErrorCode::InvalidDescriptor, "min-max normalize: point has no descriptor");
    FeaturePoint out = p;
    auto& d = *out.descriptor;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    const double mn = *lo;
    const double range = *hi - mn;
    for (double& v : d) v = range > 0.0 ? (v - mn) / range : 0.0;
    return out;
}

Template normalize_descriptors(const Template& t, NormalizationMode mode) {
    Template out = t;
    if (mode == NormalizationMode::PerDescriptor) {
        for (auto& p : out.points) p = min_max_normalize(p);
        return out;
    }
    require_descriptors(t, "per-component normalization");
    if (out.points.empty()) return out;
    for (std::size_t c = 0; c < kDescriptorSize; ++c) {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        for (const auto& p : out.points) {
            mn = std::min(mn, (*p.descriptor)[c]);
            mx = std::max(mx, (*p.descriptor)[c]);
        }
        const double range = mx - mn;
        for (auto& p : out.points) {
            double& v = (*p.descriptor)[c];
            v = range > 0.0 ? (v - mn) / range : 0.0;
        }
    }
    return out;
}

Template make_compatible(const Template& minutiae, const GrayImage& image, const GaborBank& bank) {
    if (minutiae.kind != TemplateKind::Finger) {
        throw Error(ErrorCode::KindMismatch, "make_compatible expects a FINGER template");
    }
    Template out = minutiae;
    for (auto& p : out.points) {
        p.descriptor = bank.describe(image, p.x, p.y);
        p = min_max_normalize(p);
    }
    return out;
}

Template make_compatible(const Template& minutiae, const GrayImage& image, const GaborBankSpec& spec) {
    return make_compatible(minutiae, image, GaborBank(spec));
}

// ---------------------------------------------------------------------------
// Deskew

Point2 rotate_about(Point2 p, Point2 center, double degrees) {
    const double c = std::cos(degrees * kDegToRad);
    const double s = std::sin(degrees * kDegToRad);
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    return {center.x + dx * c - dy * s, center.y + dx * s + dy * c};
}

GrayImage rotate_image(const GrayImage& image, Point2 center, double degrees, std::uint8_t fill) {
    image.validate();
    GrayImage out(image.width, image.height, fill);
    const double c = std::cos(degrees * kDegToRad);
    const double s = std::sin(degrees * kDegToRad);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            // inverse map: source = R(-degrees) (p - center) + center
            const double dx = x - center.x;
            const double dy = y - center.y;
            const double sx = center.x + dx * c + dy * s;
            const double sy = center.y - dx * s + dy * c;
            const double v = sample_bilinear(image, sx, sy, fill);
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

DeskewResult deskew(const GrayImage& image, int foregroundThreshold) {
    image.validate();
    std::size_t fgCount = 0;
    const BoundingBox box = foreground_box(image, foregroundThreshold, fgCount);
    if (fgCount == 0) throw Error(ErrorCode::EmptyForeground, "deskew: image has no foreground pixels");

    // left/right edges: per row, the first/last foreground column, as (y, x)
    std::vector<Point2> left, right, top;
    for (int y = 0; y < image.height; ++y) {
        int first = -1, last = -1;
        for (int x = 0; x < image.width; ++x) {
            if (image.at(x, y) < foregroundThreshold) {
                if (first < 0) first = x;
                last = x;
            }
        }
        if (first >= 0) {
            left.push_back({static_cast<double>(y), static_cast<double>(first)});
            right.push_back({static_cast<double>(y), static_cast<double>(last)});
        }
    }
    // top edge: per column, the first foreground row, as (x, y)
    for (int x = 0; x < image.width; ++x) {
        for (int y = 0; y < image.height; ++y) {
            if (image.at(x, y) < foregroundThreshold) {
                top.push_back({static_cast<double>(x), static_cast<double>(y)});
                break;
            }
        }
    }

    const LineFit leftFit = robust_edge_fit(std::move(left), "left");
    const LineFit rightFit = robust_edge_fit(std::move(right), "right");
    const LineFit topFit = robust_edge_fit(std::move(top), "top");

    // x = m*y + b for a side edge turned by a gives m = -tan(a); the top edge
    // y = m*x + b gives m = tan(a). Averaging happens on angles.
    const double angle = (-std::atan(leftFit.slope) - std::atan(rightFit.slope) + std::atan(topFit.slope)) / 3.0 *
                         kRadToDeg;
    if (std::fabs(angle) > 45.0) {
        throw Error(ErrorCode::SegmentationFailure,
                    "deskew: estimated angle " + std::to_string(angle) + " outside [-45, 45]");
    }

    DeskewResult result;
    result.angle = angle;
    result.center = box.center();
    result.rotated = rotate_image(image, result.center, -angle);
    std::size_t rotatedCount = 0;
    result.boundingBox = foreground_box(result.rotated, foregroundThreshold, rotatedCount);
    return result;
}

Template apply_deskew(const Template& t, const DeskewResult& d) {
    Template out = t;
    for (auto& p : out.points) {
        const Point2 q = rotate_about({p.x, p.y}, d.center, -d.angle);
        p.x = q.x;
        p.y = q.y;
        p.theta = wrap_degrees(p.theta - d.angle);
    }
    if (out.referencePoint) out.referencePoint = rotate_about(*out.referencePoint, d.center, -d.angle);
    return out;
}

// ---------------------------------------------------------------------------
// Registration

Template register_to(const Template& t, Point2 target) {
    if (!t.referencePoint) throw Error(ErrorCode::MissingReference, "registration: template has no reference point");
    const double dx = target.x - t.referencePoint->x;
    const double dy = target.y - t.referencePoint->y;
    Template out = t;
    for (auto& p : out.points) {
        p.x += dx;
        p.y += dy;
    }
    out.referencePoint = target;
    return out;
}

Template register_translation(const Template& db, const Template& query) {
    if (!db.referencePoint) throw Error(ErrorCode::MissingReference, "registration: database template has no reference point");
    return register_to(query, *db.referencePoint);
}

Template scale_normalize(const Template& t, int targetDpi) {
    if (!t.dpi) throw Error(ErrorCode::MissingDpi, "scale_normalize: template has no dpi");
    if (targetDpi <= 0 || *t.dpi <= 0) throw Error(ErrorCode::InvalidArgument, "scale_normalize: dpi must be positive");
    if (*t.dpi == targetDpi) return t;
    const double f = static_cast<double>(targetDpi) / static_cast<double>(*t.dpi);
    Template out = t;
    for (auto& p : out.points) {
        p.x *= f;
        p.y *= f;
    }
    if (out.referencePoint) out.referencePoint = Point2{out.referencePoint->x * f, out.referencePoint->y * f};
    for (auto& [key, pt] : out.landmarks) pt = {pt.x * f, pt.y * f};
    out.dpi = targetDpi;
    return out;
}

}  // namespace biofuse
