#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biofuse/core.hpp"

namespace biofuse {

/// 17 significant digits, locale independent; parses back to the same double.
std::string format_number(double v);

/// Shortest round-trip form with a decimal point ("1.0", "0.25").
std::string format_decimal(double v);

double parse_number(std::string_view token, std::string_view context);
long long parse_integer(std::string_view token, std::string_view context);

std::vector<std::string_view> split_whitespace(std::string_view line);

// --- templates -------------------------------------------------------------
//
//   kind FUSED
//   dpi 500
//   refpoint <x> <y>
//   landmark <leftEye|rightEye|noseTip|mouth> <x> <y>
//   <FACE|FINGER> <x> <y> <theta> [d1 .. d128]
//
// Blank lines and lines starting with '#' are ignored.

/// `declared` supplies the kind for input without a kind line (an empty file).
Template parse_template(std::string_view text, std::optional<TemplateKind> declared = std::nullopt,
                        std::string_view source = "<template>");
std::string serialize_template(const Template& t);

Template load_template(const std::filesystem::path& path, std::optional<TemplateKind> declared = std::nullopt);
void save_template(const Template& t, const std::filesystem::path& path);

// --- images ----------------------------------------------------------------

GrayImage decode_pgm(std::string_view bytes, std::string_view source = "<pgm>");
std::string encode_pgm(const GrayImage& image);

GrayImage load_image_pgm(const std::filesystem::path& path);
void save_image_pgm(const GrayImage& image, const std::filesystem::path& path);

// --- key/value configuration -----------------------------------------------

/// Flat `key = value` text with dotted keys. Later keys override earlier ones.
class KeyValues {
public:
    static KeyValues parse(std::string_view text, std::string_view source = "<config>");
    static KeyValues load(const std::filesystem::path& path);

    void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }
    bool contains(std::string_view key) const { return entries_.find(std::string(key)) != entries_.end(); }
    std::optional<std::string> get(std::string_view key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    std::string serialize() const;

private:
    std::map<std::string, std::string> entries_;
};

// --- manifests ---------------------------------------------------------------

struct SampleRecord {
    int sampleId = 0;
    std::filesystem::path face;
    std::filesystem::path fingerTemplate;
    std::filesystem::path fingerImage;
};

struct SubjectRecord {
    int subjectId = 0;
    std::vector<SampleRecord> samples;
};

/// Dataset listing. Paths are stored relative to the manifest file's
/// directory and resolved against `baseDir` on load.
struct Manifest {
    std::vector<SubjectRecord> subjects;
    KeyValues generator;  // echo of the generator parameters, if any
    std::filesystem::path baseDir;

    std::filesystem::path resolve(const std::filesystem::path& p) const { return baseDir / p; }
    std::size_t sample_count() const;
};

std::string serialize_manifest(const Manifest& m);

/// Parses and validates: unique subject ids and every referenced file present.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& m, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace biofuse
