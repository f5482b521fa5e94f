#include "pwcv/pfm.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

namespace pwcv {

static_assert(std::endian::native == std::endian::little, "PFM writer assumes little endian");

void write_pfm(const Image& image, const std::string& path) {
    if (image.width == 0 || image.height == 0 ||
        (image.channels != 1 && image.channels != 3) ||
        image.data.size() != image.width * image.height * image.channels)
        throw std::invalid_argument("write_pfm: malformed image");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pfm: cannot open " + path);
    os << (image.channels == 3 ? "PF" : "Pf") << '\n'
       << image.width << ' ' << image.height << '\n'
       << "-1.0" << '\n';
    // Bottom row first.
    const std::size_t row_floats = image.width * image.channels;
    for (std::size_t y = image.height; y-- > 0;)
        os.write(reinterpret_cast<const char*>(image.data.data() + y * row_floats),
                 static_cast<std::streamsize>(row_floats * sizeof(float)));
    if (!os) throw std::runtime_error("write_pfm: I/O failure writing " + path);
}

Image read_pfm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_pfm: cannot open " + path);
    std::string tag;
    double scale = 0.0;
    Image img;
    is >> tag >> img.width >> img.height >> scale;
    if ((tag != "Pf" && tag != "PF") || !is || scale >= 0.0)
        throw std::runtime_error("read_pfm: unsupported header in " + path);
    img.channels = tag == "PF" ? 3 : 1;
    is.get();  // single whitespace after the header
    img.data.resize(img.width * img.height * img.channels);
    const std::size_t row_floats = img.width * img.channels;
    for (std::size_t y = img.height; y-- > 0;)
        is.read(reinterpret_cast<char*>(img.data.data() + y * row_floats),
                static_cast<std::streamsize>(row_floats * sizeof(float)));
    if (!is) throw std::runtime_error("read_pfm: truncated file " + path);
    return img;
}

}  // namespace pwcv
