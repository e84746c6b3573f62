#include "dehaze/image_io.hpp"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace dehaze {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("io", "cannot open '" + path.string() + "'");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("io", "cannot read '" + path.string() + "'");
    }
    return bytes;
}

unsigned char to_byte(double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

struct PngReadState {
    const std::vector<unsigned char>* bytes;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count)
{
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->offset + count > st->bytes->size()) {
        png_error(png, "truncated PNG data");
    }
    std::memcpy(out, st->bytes->data() + st->offset, count);
    st->offset += count;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t count)
{
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void png_flush_noop(png_structp) {}

// libpng reports errors by longjmp; every frame that can be jumped over holds
// only trivially destructible state.
struct PngErrorSlot {
    char message[256];
};

void png_error_record(png_structp png, png_const_charp msg)
{
    auto* slot = static_cast<PngErrorSlot*>(png_get_error_ptr(png));
    std::snprintf(slot->message, sizeof slot->message, "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

struct PngHeader {
    png_uint_32 width;
    png_uint_32 height;
    int channels;
    int depth;
    int color;
    png_size_t rowbytes;
};

int png_read_header(png_structp png, png_infop info, int keep_16, PngHeader* h)
{
    if (setjmp(png_jmpbuf(png))) {
        return -1;
    }
    png_read_info(png, info);
    h->color = png_get_color_type(png, info);
    h->depth = png_get_bit_depth(png, info);
    if (keep_16) {
        if (h->color != PNG_COLOR_TYPE_GRAY || h->depth != 16) {
            return 1;
        }
    } else {
        png_set_expand(png);
        if (h->depth == 16) {
            png_set_strip_16(png);
        }
        if (h->color == PNG_COLOR_TYPE_GRAY || h->color == PNG_COLOR_TYPE_GRAY_ALPHA) {
            png_set_gray_to_rgb(png);
        }
        if ((h->color & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) {
            png_set_strip_alpha(png);
        }
    }
    png_read_update_info(png, info);
    h->width = png_get_image_width(png, info);
    h->height = png_get_image_height(png, info);
    h->channels = png_get_channels(png, info);
    h->depth = png_get_bit_depth(png, info);
    h->rowbytes = png_get_rowbytes(png, info);
    return 0;
}

int png_read_rows(png_structp png, png_bytepp rows)
{
    if (setjmp(png_jmpbuf(png))) {
        return -1;
    }
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    return 0;
}

int png_write_all(png_structp png, png_infop info, png_uint_32 width, png_uint_32 height, int color, int depth,
                  png_bytepp rows)
{
    if (setjmp(png_jmpbuf(png))) {
        return -1;
    }
    png_set_IHDR(png, info, width, height, depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return 0;
}

struct DecodedPng {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> rows;  // packed, big-endian for 16-bit
};

// `keep_16` requires a 16-bit grayscale file; otherwise everything is expanded
// to 8-bit RGB.
DecodedPng decode_png(const std::vector<unsigned char>& bytes, bool keep_16, const std::string& name)
{
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw IoError("io", "'" + name + "' is not a PNG file");
    }
    PngErrorSlot err{};
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_record, png_warning_ignore);
    if (!png) {
        throw IoError("io", "png: out of memory");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    if (!info) {
        throw IoError("io", "png: out of memory");
    }
    PngReadState state{&bytes, 0};
    png_set_read_fn(png, &state, png_read_from_memory);
    PngHeader h{};
    const int status = png_read_header(png, info, keep_16 ? 1 : 0, &h);
    if (status < 0) {
        throw IoError("io", "'" + name + "': " + err.message);
    }
    if (status > 0) {
        throw IoError("io", "'" + name + "' is not a 16-bit grayscale PNG");
    }
    const int expected_channels = keep_16 ? 1 : 3;
    if (h.channels != expected_channels || h.width == 0 || h.height == 0 || h.width > 65535 || h.height > 65535) {
        throw IoError("io", "'" + name + "' has an unsupported PNG layout");
    }
    DecodedPng out;
    out.width = static_cast<int>(h.width);
    out.height = static_cast<int>(h.height);
    out.rows.resize(h.rowbytes * h.height);
    std::vector<png_bytep> ptrs(h.height);
    for (png_uint_32 y = 0; y < h.height; ++y) {
        ptrs[y] = out.rows.data() + h.rowbytes * y;
    }
    if (png_read_rows(png, ptrs.data()) != 0) {
        throw IoError("io", "'" + name + "': " + err.message);
    }
    return out;
}

std::vector<unsigned char> encode_png_raw(int width, int height, int color_type, int depth,
                                          std::vector<unsigned char>& packed)
{
    std::vector<unsigned char> out;
    PngErrorSlot err{};
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_record, png_warning_ignore);
    if (!png) {
        throw IoError("io", "png: out of memory");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    if (!info) {
        throw IoError("io", "png: out of memory");
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    const std::size_t stride = packed.size() / height;
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = packed.data() + stride * y;
    }
    if (png_write_all(png, info, width, height, color_type, depth, rows.data()) != 0) {
        throw IoError("io", std::string("png: ") + err.message);
    }
    return out;
}

Image decode_ppm(const std::vector<unsigned char>& bytes, const std::string& name)
{
    std::size_t pos = 0;
    const auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    const auto number = [&] {
        skip_space();
        long v = 0;
        int digits = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos]) && digits < 9) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            ++digits;
        }
        if (digits == 0) {
            throw IoError("io", "'" + name + "' has a malformed PPM header");
        }
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw IoError("io", "'" + name + "' is not a binary PPM (P6)");
    }
    pos = 2;
    const long w = number();
    const long h = number();
    const long maxval = number();
    if (w < 1 || h < 1 || w > 65535 || h > 65535 || maxval < 1 || maxval > 65535) {
        throw IoError("io", "'" + name + "' has unsupported PPM dimensions or maxval");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw IoError("io", "'" + name + "' has a malformed PPM header");
    }
    ++pos;
    const int sample = maxval > 255 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(w) * h * 3 * sample;
    if (bytes.size() - pos < need) {
        throw IoError("io", "'" + name + "' is truncated");
    }
    Image img(static_cast<int>(w), static_cast<int>(h));
    auto d = img.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
        const unsigned v = sample == 1 ? bytes[pos + k] : (bytes[pos + 2 * k] << 8) | bytes[pos + 2 * k + 1];
        d[k] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
}

}  // namespace

Image read_image(const fs::path& path)
{
    const std::vector<unsigned char> bytes = read_bytes(path);
    const std::string name = path.string();
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return decode_ppm(bytes, name);
    }
    const DecodedPng png = decode_png(bytes, false, name);
    Image img(png.width, png.height);
    auto d = img.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = png.rows[k] / 255.0;
    }
    return img;
}

ScalarMap read_map16(const fs::path& path)
{
    const DecodedPng png = decode_png(read_bytes(path), true, path.string());
    ScalarMap m(png.width, png.height);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const unsigned v = (png.rows[2 * i] << 8) | png.rows[2 * i + 1];
        m[i] = v / 65535.0;
    }
    return m;
}

std::vector<unsigned char> encode_png(const Image& img)
{
    if (img.empty()) {
        throw IoError("io", "cannot encode an empty image");
    }
    std::vector<unsigned char> packed(img.data().size());
    std::transform(img.data().begin(), img.data().end(), packed.begin(), to_byte);
    return encode_png_raw(img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, packed);
}

std::vector<unsigned char> encode_ppm(const Image& img)
{
    if (img.empty()) {
        throw IoError("io", "cannot encode an empty image");
    }
    const std::string header = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.reserve(out.size() + img.data().size());
    for (double v : img.data()) {
        out.push_back(to_byte(v));
    }
    return out;
}

std::vector<unsigned char> encode_map16(const ScalarMap& map)
{
    if (map.size() == 0) {
        throw IoError("io", "cannot encode an empty map");
    }
    std::vector<unsigned char> packed(map.size() * 2);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto v = static_cast<unsigned>(std::lround(std::clamp(map[i], 0.0, 1.0) * 65535.0));
        packed[2 * i] = static_cast<unsigned char>(v >> 8);
        packed[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
    }
    return encode_png_raw(map.width(), map.height(), PNG_COLOR_TYPE_GRAY, 16, packed);
}

std::vector<unsigned char> encode_image_for(const fs::path& path, const Image& img)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".ppm" ? encode_ppm(img) : encode_png(img);
}

OutputBatch::~OutputBatch()
{
    std::error_code ec;
    for (const fs::path& t : temporaries_) {
        fs::remove(t, ec);
    }
}

void OutputBatch::add(const fs::path& target, std::vector<unsigned char> bytes)
{
    entries_.push_back({target, std::move(bytes)});
}

void OutputBatch::add_text(const fs::path& target, const std::string& text)
{
    add(target, std::vector<unsigned char>(text.begin(), text.end()));
}

void OutputBatch::commit()
{
    static int counter = 0;
    const auto fail = [this](const std::string& msg) {
        std::error_code ec;
        for (const fs::path& t : temporaries_) {
            fs::remove(t, ec);
        }
        temporaries_.clear();
        throw IoError("io", msg);
    };
    for (const Entry& e : entries_) {
        const fs::path dir = e.target.has_parent_path() ? e.target.parent_path() : fs::path(".");
        std::error_code ec;
        fs::create_directories(dir, ec);
        const fs::path tmp = dir / ("." + e.target.filename().string() + ".tmp" + std::to_string(::getpid()) + "_" +
                                    std::to_string(counter++));
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail("cannot create '" + tmp.string() + "'");
        }
        temporaries_.push_back(tmp);
        out.write(reinterpret_cast<const char*>(e.bytes.data()), static_cast<std::streamsize>(e.bytes.size()));
        out.close();
        if (!out) {
            fail("cannot write '" + tmp.string() + "'");
        }
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        std::error_code ec;
        fs::rename(temporaries_[i], entries_[i].target, ec);
        if (ec) {
            // Roll back the renames already done.
            for (std::size_t j = 0; j < i; ++j) {
                fs::remove(entries_[j].target, ec);
            }
            fail("cannot move output into '" + entries_[i].target.string() + "'");
        }
    }
    temporaries_.clear();
    entries_.clear();
}

void write_file_atomic(const fs::path& target, std::vector<unsigned char> bytes)
{
    OutputBatch batch;
    batch.add(target, std::move(bytes));
    batch.commit();
}

std::string read_text_file(const fs::path& path)
{
    const std::vector<unsigned char> bytes = read_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

}  // namespace dehaze
