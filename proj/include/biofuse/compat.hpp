#pragma once

#include <vector>

#include "biofuse/core.hpp"

namespace biofuse {

/// Gabor filter bank used to give minutiae a 128-value local descriptor.
/// Wavelengths form a geometric ladder base * ratio^s; the Gaussian envelope
/// has sigma = sigmaFactor * wavelength and is truncated to the patch.
struct GaborBankSpec {
    std::vector<double> orientations{0.0, 22.5, 45.0, 67.5, 90.0, 112.5, 135.0, 157.5};  // degrees
    int scaleCount = 8;
    std::vector<double> phases{0.0, 1.5707963267948966};  // radians
    int patchRadius = 16;
    double baseWavelength = 4.0;
    double wavelengthRatio = 1.4142135623730951;
    double sigmaFactor = 0.5;

    std::size_t channel_count() const { return orientations.size() * static_cast<std::size_t>(scaleCount) * phases.size(); }
    double wavelength(int scale) const;
    void validate() const;
};

/// Precomputed zero-mean kernels for a GaborBankSpec. Channel order is
/// orientation-major, then scale, then phase.
class GaborBank {
public:
    explicit GaborBank(GaborBankSpec spec);

    const GaborBankSpec& spec() const { return spec_; }
    int side() const { return 2 * spec_.patchRadius + 1; }

    /// Kernel weights for one channel, row-major over the (2R+1)^2 patch.
    const std::vector<double>& kernel(std::size_t channel) const { return kernels_[channel]; }

    static std::size_t channel_index(std::size_t orientation, std::size_t scale, std::size_t phase,
                                     std::size_t scaleCount, std::size_t phaseCount) {
        return (orientation * scaleCount + scale) * phaseCount + phase;
    }

    /// Raw (unnormalized) responses at the pixel nearest to (x, y). Pixels
    /// outside the image are replaced by the nearest edge pixel.
    Descriptor describe(const GrayImage& image, double x, double y) const;

private:
    GaborBankSpec spec_;
    std::vector<std::vector<double>> kernels_;
};

Descriptor gabor_keydescriptor(const GrayImage& image, double x, double y, const GaborBankSpec& spec);

enum class NormalizationMode { PerDescriptor, PerComponent };

/// Maps every descriptor value into [0, 1] using the descriptor's own range.
/// A constant descriptor maps to all zeros.
FeaturePoint min_max_normalize(const FeaturePoint& p);

/// Applies min-max normalization to every point. PerComponent uses, for each
/// of the 128 components, the range across the template's points.
Template normalize_descriptors(const Template& t, NormalizationMode mode = NormalizationMode::PerDescriptor);

Template make_compatible(const Template& minutiae, const GrayImage& image, const GaborBankSpec& spec);
Template make_compatible(const Template& minutiae, const GrayImage& image, const GaborBank& bank);

struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    Point2 center() const { return {x + width / 2.0, y + height / 2.0}; }
};

struct DeskewResult {
    double angle = 0.0;  // degrees; foreground rotation that was removed
    GrayImage rotated;
    BoundingBox boundingBox;  // foreground box in the rotated image
    Point2 center;            // rotation center (input foreground box center)
};

/// Estimates the foreground slope from least-squares fits to its left, top and
/// right edges and rotates it back. Foreground pixels are those strictly
/// darker than the threshold.
DeskewResult deskew(const GrayImage& image, int foregroundThreshold = 128);

/// Moves point coordinates, orientations and the reference point into the
/// frame of DeskewResult::rotated.
Template apply_deskew(const Template& t, const DeskewResult& d);

Point2 rotate_about(Point2 p, Point2 center, double degrees);

/// Rotates an image by `degrees` about `center` with bilinear sampling.
GrayImage rotate_image(const GrayImage& image, Point2 center, double degrees, std::uint8_t fill = 255);

Template register_translation(const Template& db, const Template& query);

/// Translates so the reference point lands on `target`.
Template register_to(const Template& t, Point2 target);

Template scale_normalize(const Template& t, int targetDpi);

}  // namespace biofuse
