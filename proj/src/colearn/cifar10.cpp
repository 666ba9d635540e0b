#include "colearn/cifar10.hpp"

#include <fstream>

namespace colearn::data {

namespace {
constexpr std::size_t kSide = 32;
constexpr std::size_t kChannels = 3;
constexpr std::size_t kPlane = kSide * kSide;
constexpr std::size_t kRecordBytes = 1 + kPlane * kChannels;
}  // namespace

ImageDataset load_cifar10_binary(const std::vector<std::string>& paths) {
    ImageDataset ds;
    ds.height = kSide;
    ds.width = kSide;
    ds.channels = kChannels;
    ds.num_classes = 10;

    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (!in) throw IoError("cannot open: " + path);
        const auto file_size = static_cast<std::size_t>(in.tellg());
        if (file_size % kRecordBytes != 0)
            throw FormatError(path + ": size is not a multiple of " +
                              std::to_string(kRecordBytes) + " bytes");
        in.seekg(0);
        const std::size_t n = file_size / kRecordBytes;
        std::vector<std::uint8_t> record(kRecordBytes);
        for (std::size_t r = 0; r < n; ++r) {
            in.read(reinterpret_cast<char*>(record.data()),
                    static_cast<std::streamsize>(kRecordBytes));
            if (!in) throw FormatError(path + ": truncated record");
            const std::uint8_t label = record[0];
            if (label >= 10)
                throw FormatError(path + ": label byte " + std::to_string(label) +
                                  " out of range");
            ds.clean_labels.push_back(label);
            ds.noisy_labels.push_back(label);
            ds.corruption_mask.push_back(0);
            const std::size_t base = ds.pixels.size();
            ds.pixels.resize(base + kPlane * kChannels);
            // planar -> interleaved
            for (std::size_t ch = 0; ch < kChannels; ++ch)
                for (std::size_t p = 0; p < kPlane; ++p)
                    ds.pixels[base + p * kChannels + ch] = record[1 + ch * kPlane + p];
        }
    }
    ds.validate();
    return ds;
}

}  // namespace colearn::data
