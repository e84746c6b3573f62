#include <gtest/gtest.h>

#include <fstream>

#include "dehaze/image_io.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

namespace {

Image quantised(Rng& rng, int w, int h)
{
    Image img(w, h);
    for (double& v : img.data()) {
        v = uniform_int(rng, 0, 255) / 255.0;
    }
    return img;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes)
{
    std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST(ImageIo, PngAndPpmRoundTrip)
{
    Rng rng(61);
    TempDir dir("io_rt");
    for (int trial = 0; trial < 6; ++trial) {
        const Image img = quantised(rng, uniform_int(rng, 1, 40), uniform_int(rng, 1, 40));
        for (const char* name : {"a.png", "a.ppm"}) {
            const auto path = dir / name;
            write_file_atomic(path, encode_image_for(path, img));
            const Image back = read_image(path);
            ASSERT_EQ(back.width(), img.width());
            ASSERT_EQ(back.height(), img.height());
            for (std::size_t i = 0; i < img.data().size(); ++i) {
                EXPECT_NEAR(back.data()[i], img.data()[i], 1e-12) << name;
            }
        }
    }
}

TEST(ImageIo, EncodingQuantisesAndClamps)
{
    Image img(2, 1);
    img.set(0, 0, {-0.2, 0.5, 1.7});
    img.set(1, 0, {0.001, 0.999, 0.2});
    const auto ppm = encode_ppm(img);
    const std::string header = "P6\n2 1\n255\n";
    ASSERT_EQ(ppm.size(), header.size() + 6);
    EXPECT_EQ(std::string(ppm.begin(), ppm.begin() + static_cast<long>(header.size())), header);
    const std::vector<unsigned char> px(ppm.begin() + static_cast<long>(header.size()), ppm.end());
    EXPECT_EQ(px, (std::vector<unsigned char>{0, 128, 255, 0, 255, 51}));
}

TEST(ImageIo, Map16IsBitExact)
{
    Rng rng(62);
    TempDir dir("io_map");
    ScalarMap m(37, 23);
    for (double& v : m.values()) {
        v = uniform_int(rng, 0, 65535) / 65535.0;
    }
    m[0] = 0.0;
    m[1] = 1.0;
    const auto path = dir / "t.png";
    write_file_atomic(path, encode_map16(m));
    const ScalarMap back = read_map16(path);
    EXPECT_EQ(back, m);
    // Re-encoding the decoded map reproduces the file byte for byte.
    EXPECT_EQ(encode_map16(back), encode_map16(m));

    ScalarMap arbitrary(3, 1);
    arbitrary[0] = 0.123456;
    arbitrary[1] = -1.0;
    arbitrary[2] = 2.0;
    write_file_atomic(path, encode_map16(arbitrary));
    const ScalarMap q = read_map16(path);
    EXPECT_EQ(q[0], std::round(0.123456 * 65535.0) / 65535.0);
    EXPECT_EQ(q[1], 0.0);
    EXPECT_EQ(q[2], 1.0);
}

TEST(ImageIo, SixteenBitPpmIsScaled)
{
    TempDir dir("io_ppm16");
    std::string bytes = "P6\n# comment\n1 1\n65535\n";
    for (int c : {0, 65535, 32768}) {
        bytes.push_back(static_cast<char>(c >> 8));
        bytes.push_back(static_cast<char>(c & 0xff));
    }
    write_bytes(dir / "x.ppm", bytes);
    const Image img = read_image(dir / "x.ppm");
    EXPECT_EQ(img.at(0, 0)[0], 0.0);
    EXPECT_EQ(img.at(0, 0)[1], 1.0);
    EXPECT_NEAR(img.at(0, 0)[2], 32768.0 / 65535.0, 1e-15);
}

TEST(ImageIo, BadFilesAreIoErrors)
{
    TempDir dir("io_bad");
    EXPECT_THROW(read_image(dir / "missing.png"), IoError);
    write_bytes(dir / "junk.png", "not an image at all");
    EXPECT_THROW(read_image(dir / "junk.png"), IoError);
    write_bytes(dir / "short.ppm", "P6\n4 4\n255\nabc");
    EXPECT_THROW(read_image(dir / "short.ppm"), IoError);
    write_bytes(dir / "p3.ppm", "P3\n1 1\n255\n1 2 3\n");
    EXPECT_THROW(read_image(dir / "p3.ppm"), IoError);
    // An 8-bit RGB PNG is not a transmission map.
    write_file_atomic(dir / "rgb.png", encode_png(Image(2, 2)));
    EXPECT_THROW(read_map16(dir / "rgb.png"), IoError);
    EXPECT_THROW(read_text_file(dir / "missing.txt"), IoError);
}

TEST(ImageIo, UncommittedBatchLeavesNothing)
{
    TempDir dir("io_batch");
    {
        OutputBatch batch;
        batch.add_text(dir / "a.txt", "a");
        batch.add(dir / "b.png", encode_png(Image(1, 1)));
    }
    EXPECT_TRUE(std::filesystem::is_empty(dir.path()));

    OutputBatch batch;
    batch.add_text(dir / "a.txt", "hello");
    batch.add_text(dir / "sub" / "b.txt", "world");
    batch.commit();
    EXPECT_EQ(read_text_file(dir / "a.txt"), "hello");
    EXPECT_EQ(read_text_file(dir / "sub" / "b.txt"), "world");
    std::size_t files = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
        files += e.is_regular_file();
    }
    EXPECT_EQ(files, 2u);
}

TEST(ImageIo, FailedCommitRemovesEverything)
{
    TempDir dir("io_fail");
    // A regular file where a directory is needed makes the second target unwritable.
    write_bytes(dir / "blocker", "x");
    OutputBatch batch;
    batch.add_text(dir / "first.txt", "1");
    batch.add_text(dir / "blocker" / "second.txt", "2");
    EXPECT_THROW(batch.commit(), IoError);
    EXPECT_FALSE(std::filesystem::exists(dir / "first.txt"));
    std::size_t entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
        (void)e;
        ++entries;
    }
    EXPECT_EQ(entries, 1u);
}

TEST(ImageIo, AtomicWriteReplacesExistingFile)
{
    TempDir dir("io_replace");
    write_file_atomic(dir / "f.txt", {'o', 'l', 'd'});
    write_file_atomic(dir / "f.txt", {'n', 'e', 'w', '!'});
    EXPECT_EQ(read_text_file(dir / "f.txt"), "new!");
}
