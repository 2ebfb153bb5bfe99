#include "biofuse/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace biofuse {

namespace fs = std::filesystem;

namespace {

std::string line_context(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        ++lineNo;
        fn(text.substr(pos, end - pos), lineNo);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_decimal(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
    return s;
}

double parse_number(std::string_view token, std::string_view context) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || token.empty()) {
        throw Error(ErrorCode::Parse, std::string(context) + ": invalid number '" + std::string(token) + "'");
    }
    return v;
}

long long parse_integer(std::string_view token, std::string_view context) {
    long long v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty()) {
        throw Error(ErrorCode::Parse, std::string(context) + ": invalid integer '" + std::string(token) + "'");
    }
    return v;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t b = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > b) out.push_back(line.substr(b, i - b));
    }
    return out;
}

// ---------------------------------------------------------------------------

Template parse_template(std::string_view text, std::optional<TemplateKind> declared, std::string_view source) {
    Template t;
    bool haveKind = false;
    for_each_line(text, [&](std::string_view raw, std::size_t lineNo) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') return;
        const auto ctx = line_context(source, lineNo);
        const auto tok = split_whitespace(line);
        const auto head = tok[0];
        if (head == "kind") {
            if (tok.size() != 2) throw Error(ErrorCode::Parse, ctx + ": expected 'kind <FACE|FINGER|FUSED>'");
            const auto k = parse_template_kind(tok[1]);
            if (!k) throw Error(ErrorCode::Parse, ctx + ": unknown template kind '" + std::string(tok[1]) + "'");
            if (haveKind) throw Error(ErrorCode::Parse, ctx + ": duplicate kind line");
            t.kind = *k;
            haveKind = true;
            return;
        }
        if (!haveKind) throw Error(ErrorCode::Parse, ctx + ": first record must be the kind line");
        if (head == "dpi") {
            if (tok.size() != 2) throw Error(ErrorCode::Parse, ctx + ": expected 'dpi <n>'");
            const auto v = parse_integer(tok[1], ctx);
            if (v <= 0) throw Error(ErrorCode::Format, ctx + ": dpi must be positive");
            t.dpi = static_cast<int>(v);
        } else if (head == "refpoint") {
            if (tok.size() != 3) throw Error(ErrorCode::Parse, ctx + ": expected 'refpoint <x> <y>'");
            t.referencePoint = Point2{parse_number(tok[1], ctx), parse_number(tok[2], ctx)};
        } else if (head == "landmark") {
            if (tok.size() != 4) throw Error(ErrorCode::Parse, ctx + ": expected 'landmark <name> <x> <y>'");
            const auto lm = parse_landmark(tok[1]);
            if (!lm) throw Error(ErrorCode::Parse, ctx + ": unknown landmark '" + std::string(tok[1]) + "'");
            t.landmarks[*lm] = Point2{parse_number(tok[2], ctx), parse_number(tok[3], ctx)};
        } else if (const auto modality = parse_modality(head)) {
            if (tok.size() < 4) throw Error(ErrorCode::Parse, ctx + ": expected '<modality> <x> <y> <theta> ...'");
            const std::size_t nDesc = tok.size() - 4;
            if (nDesc != 0 && nDesc != kDescriptorSize) {
                throw Error(ErrorCode::Format, ctx + ": expected 0 or 128 descriptor values, got " + std::to_string(nDesc));
            }
            FeaturePoint p;
            p.modality = *modality;
            p.x = parse_number(tok[1], ctx);
            p.y = parse_number(tok[2], ctx);
            p.theta = parse_number(tok[3], ctx);
            if (!(p.theta >= 0.0 && p.theta < 360.0)) {
                throw Error(ErrorCode::Format, ctx + ": theta must lie in [0, 360)");
            }
            if (nDesc == kDescriptorSize) {
                Descriptor d{};
                for (std::size_t i = 0; i < kDescriptorSize; ++i) d[i] = parse_number(tok[4 + i], ctx);
                p.descriptor = d;
            }
            t.points.push_back(std::move(p));
        } else {
            throw Error(ErrorCode::Parse, ctx + ": unknown record '" + std::string(head) + "'");
        }
    });
    if (!haveKind) {
        if (!declared) throw Error(ErrorCode::Parse, std::string(source) + ": missing kind line");
        t.kind = *declared;
    }
    return t;
}

std::string serialize_template(const Template& t) {
    std::string out;
    out += "kind ";
    out += to_string(t.kind);
    out += '\n';
    if (t.dpi) out += "dpi " + std::to_string(*t.dpi) + '\n';
    if (t.referencePoint) {
        out += "refpoint " + format_number(t.referencePoint->x) + ' ' + format_number(t.referencePoint->y) + '\n';
    }
    for (const auto& [key, p] : t.landmarks) {
        out += "landmark ";
        out += to_string(key);
        out += ' ' + format_number(p.x) + ' ' + format_number(p.y) + '\n';
    }
    for (const auto& p : t.points) {
        out += to_string(p.modality);
        out += ' ' + format_number(p.x) + ' ' + format_number(p.y) + ' ' + format_number(p.theta);
        if (p.descriptor) {
            for (double v : *p.descriptor) {
                out += ' ';
                out += format_number(v);
            }
        }
        out += '\n';
    }
    return out;
}

Template load_template(const fs::path& path, std::optional<TemplateKind> declared) {
    return parse_template(read_file(path), declared, path.string());
}

void save_template(const Template& t, const fs::path& path) {
    write_file(path, serialize_template(t));
}

// ---------------------------------------------------------------------------

GrayImage decode_pgm(std::string_view bytes, std::string_view source) {
    const std::string src(source);
    if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, src + ": not a PGM file");
    if (bytes[1] != '5') {
        throw Error(ErrorCode::UnsupportedFormat, src + ": only binary PGM (P5) is supported, got P" + std::string(1, bytes[1]));
    }
    std::size_t pos = 2;
    const auto next_field = [&]() -> long long {
        // whitespace and comments may separate header fields
        while (pos < bytes.size()) {
            const char c = bytes[pos];
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t b = pos;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') ++pos;
        if (b == pos) throw Error(ErrorCode::Parse, src + ": malformed PGM header");
        return parse_integer(bytes.substr(b, pos - b), src);
    };
    const long long w = next_field();
    const long long h = next_field();
    const long long maxval = next_field();
    if (maxval != 255) {
        throw Error(ErrorCode::UnsupportedFormat, src + ": maxval must be 255, got " + std::to_string(maxval));
    }
    if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) throw Error(ErrorCode::Parse, src + ": bad PGM dimensions");
    if (pos >= bytes.size()) throw Error(ErrorCode::Parse, src + ": truncated PGM header");
    ++pos;  // single whitespace before the raster
    const auto need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() - pos < need) {
        throw Error(ErrorCode::Parse, src + ": truncated pixel data (" + std::to_string(bytes.size() - pos) + " of " +
                                          std::to_string(need) + " bytes)");
    }
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < need; ++i) img.pixels[i] = static_cast<std::uint8_t>(bytes[pos + i]);
    return img;
}

std::string encode_pgm(const GrayImage& image) {
    image.validate();
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

GrayImage load_image_pgm(const fs::path& path) {
    return decode_pgm(read_file(path), path.string());
}

void save_image_pgm(const GrayImage& image, const fs::path& path) {
    write_file(path, encode_pgm(image));
}

// ---------------------------------------------------------------------------

KeyValues KeyValues::parse(std::string_view text, std::string_view source) {
    KeyValues kv;
    for_each_line(text, [&](std::string_view raw, std::size_t lineNo) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') return;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::Config, line_context(source, lineNo) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorCode::Config, line_context(source, lineNo) + ": empty key");
        kv.entries_[std::string(key)] = std::string(value);
    });
    return kv;
}

KeyValues KeyValues::load(const fs::path& path) {
    return parse(read_file(path), path.string());
}

std::optional<std::string> KeyValues::get(std::string_view key) const {
    const auto it = entries_.find(std::string(key));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValues::serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + '\n';
    return out;
}

// ---------------------------------------------------------------------------

std::size_t Manifest::sample_count() const {
    std::size_t n = 0;
    for (const auto& s : subjects) n += s.samples.size();
    return n;
}

std::string serialize_manifest(const Manifest& m) {
    std::string out = "# biofuse manifest\n";
    for (const auto& [k, v] : m.generator.entries()) out += "generator." + k + " = " + v + '\n';
    for (const auto& s : m.subjects) {
        out += "subject " + std::to_string(s.subjectId) + '\n';
        for (const auto& r : s.samples) {
            out += "sample " + std::to_string(r.sampleId) + ' ' + r.face.generic_string() + ' ' +
                   r.fingerTemplate.generic_string() + ' ' + r.fingerImage.generic_string() + '\n';
        }
    }
    return out;
}

Manifest load_manifest(const fs::path& path) {
    const std::string text = read_file(path);
    const std::string src = path.string();
    Manifest m;
    m.baseDir = path.parent_path();
    std::set<int> ids;
    for_each_line(text, [&](std::string_view raw, std::size_t lineNo) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') return;
        const auto ctx = line_context(src, lineNo);
        if (line.starts_with("generator.")) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw Error(ErrorCode::Manifest, ctx + ": expected 'generator.key = value'");
            m.generator.set(std::string(trim(line.substr(10, eq - 10))), std::string(trim(line.substr(eq + 1))));
            return;
        }
        const auto tok = split_whitespace(line);
        if (tok[0] == "subject") {
            if (tok.size() != 2) throw Error(ErrorCode::Manifest, ctx + ": expected 'subject <id>'");
            const int id = static_cast<int>(parse_integer(tok[1], ctx));
            if (!ids.insert(id).second) throw Error(ErrorCode::Manifest, ctx + ": duplicate subject id " + std::to_string(id));
            m.subjects.push_back({id, {}});
        } else if (tok[0] == "sample") {
            if (tok.size() != 5) {
                throw Error(ErrorCode::Manifest, ctx + ": expected 'sample <id> <face> <finger-template> <finger-image>'");
            }
            if (m.subjects.empty()) throw Error(ErrorCode::Manifest, ctx + ": sample before any subject");
            SampleRecord r;
            r.sampleId = static_cast<int>(parse_integer(tok[1], ctx));
            r.face = fs::path(std::string(tok[2]));
            r.fingerTemplate = fs::path(std::string(tok[3]));
            r.fingerImage = fs::path(std::string(tok[4]));
            for (const auto* p : {&r.face, &r.fingerTemplate, &r.fingerImage}) {
                if (!fs::exists(m.resolve(*p))) {
                    throw Error(ErrorCode::Manifest, ctx + ": referenced file '" + p->generic_string() + "' does not exist");
                }
            }
            m.subjects.back().samples.push_back(std::move(r));
        } else {
            throw Error(ErrorCode::Manifest, ctx + ": unknown record '" + std::string(tok[0]) + "'");
        }
    });
    return m;
}

void save_manifest(const Manifest& m, const fs::path& path) {
    write_file(path, serialize_manifest(m));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

}  // namespace biofuse
