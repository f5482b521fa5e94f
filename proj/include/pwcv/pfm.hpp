#pragma once

#include <string>
#include <vector>

namespace pwcv {

// Float image in row-major order, row 0 at the top; channels 1 (gray) or 3.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::vector<float> data;  // width * height * channels
};

// NetPBM float format: "Pf"/"PF" header, scale -1.0 (little endian), scanlines
// stored bottom-to-top as 32-bit floats.
void write_pfm(const Image& image, const std::string& path);
Image read_pfm(const std::string& path);

}  // namespace pwcv
