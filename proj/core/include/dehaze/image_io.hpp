#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

/// Reads an 8-bit PNG (any colour type, converted to RGB) or a binary PPM (P6,
/// maxval up to 65535). Channels are scaled into [0,1]. Throws IoError.
Image read_image(const std::filesystem::path& path);

/// 8-bit RGB PNG, channel = round(255 v) after clamping.
std::vector<unsigned char> encode_png(const Image& img);
/// Binary PPM (P6, maxval 255).
std::vector<unsigned char> encode_ppm(const Image& img);
/// 16-bit grayscale PNG, value = round(65535 t) after clamping to [0,1].
std::vector<unsigned char> encode_map16(const ScalarMap& map);

/// Reads a 16-bit grayscale PNG written by encode_map16 (value / 65535).
ScalarMap read_map16(const std::filesystem::path& path);

/// Format picked from the extension: .ppm writes P6, anything else PNG.
std::vector<unsigned char> encode_image_for(const std::filesystem::path& path, const Image& img);

/// A set of files written to temporaries next to their targets and renamed into
/// place only by commit(). Destroying an uncommitted batch removes the temporaries.
class OutputBatch {
public:
    OutputBatch() = default;
    OutputBatch(const OutputBatch&) = delete;
    OutputBatch& operator=(const OutputBatch&) = delete;
    ~OutputBatch();

    void add(const std::filesystem::path& target, std::vector<unsigned char> bytes);
    void add_text(const std::filesystem::path& target, const std::string& text);
    /// Writes every temporary, then renames them all. Throws IoError; on failure
    /// no target written by this batch is left behind.
    void commit();

private:
    struct Entry {
        std::filesystem::path target;
        std::vector<unsigned char> bytes;
    };
    std::vector<Entry> entries_;
    std::vector<std::filesystem::path> temporaries_;
};

/// Single-file convenience wrapper around OutputBatch.
void write_file_atomic(const std::filesystem::path& target, std::vector<unsigned char> bytes);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace dehaze
