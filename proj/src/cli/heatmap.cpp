#include "fieldsim/cli/heatmap.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include <png.h>

#include "fieldsim/cli/report.hpp"
#include "fieldsim/errors.hpp"

namespace fieldsim::cli {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

void write_png_gray(const std::filesystem::path& path, int width, int height, const std::vector<unsigned char>& pixels)
{
    if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidParameter("pixel buffer does not match image size");
    }
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw InvalidParameter("cannot open '" + path.string() + "' for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng failed writing '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, pixels.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::vector<std::filesystem::path> write_heatmaps(std::span<const ResultRow> rows, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    for (const Method method : {Method::Analytic, Method::MonteCarlo}) {
        std::vector<const ResultRow*> mine;
        for (const ResultRow& r : rows) {
            if (r.method == method) {
                mine.push_back(&r);
            }
        }
        if (mine.empty()) {
            continue;
        }
        const auto [lo, hi] = std::minmax_element(mine.begin(), mine.end(), [](const ResultRow* a, const ResultRow* b) {
            return a->probability < b->probability;
        });
        const double low = (*lo)->probability;
        const double span = (*hi)->probability - low;

        std::map<double, std::vector<const ResultRow*>> slices;
        for (const ResultRow* r : mine) {
            slices[r->arm].push_back(r);
        }
        for (const auto& [arm, slice] : slices) {
            std::set<double> ratio_set;
            std::set<double> pitch_set;
            for (const ResultRow* r : slice) {
                ratio_set.insert(r->ratio);
                pitch_set.insert(r->pitch);
            }
            const std::vector<double> ratios(ratio_set.begin(), ratio_set.end());
            const std::vector<double> pitches(pitch_set.begin(), pitch_set.end());
            const int cell = kHeatmapCellPixels;
            const int width = cell * static_cast<int>(ratios.size());
            const int height = cell * static_cast<int>(pitches.size());
            // white marks cells with no sample
            std::vector<unsigned char> pixels(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 255);

            const std::string stem = std::string("heatmap_") + to_string(method) + "_arm" + format_number(arm);
            std::ofstream grid(dir / (stem + ".csv"), std::ios::binary | std::ios::trunc);
            grid << "ratio,pitch_mm,probability,normalized\n";
            for (const ResultRow* r : slice) {
                const double v = span > 0.0 ? (r->probability - low) / span : 0.0;
                grid << format_number(r->ratio) << ',' << format_number(r->pitch) << ',' << format_number(r->probability)
                     << ',' << format_number(v) << '\n';
                const auto cx = std::lower_bound(ratios.begin(), ratios.end(), r->ratio) - ratios.begin();
                // pitch grows upwards
                const auto cy = static_cast<std::ptrdiff_t>(pitches.size()) - 1
                                - (std::lower_bound(pitches.begin(), pitches.end(), r->pitch) - pitches.begin());
                const auto shade = static_cast<unsigned char>(std::lround(235.0 * (1.0 - v)));
                for (int y = 0; y < cell; ++y) {
                    for (int x = 0; x < cell; ++x) {
                        const std::size_t px = static_cast<std::size_t>(cx * cell + x);
                        const std::size_t py = static_cast<std::size_t>(cy * cell + y);
                        pixels[py * static_cast<std::size_t>(width) + px] = shade;
                    }
                }
            }
            if (!grid) {
                throw InvalidParameter("cannot write heatmap grid in '" + dir.string() + "'");
            }
            write_png_gray(dir / (stem + ".png"), width, height, pixels);
            written.push_back(dir / (stem + ".png"));
            written.push_back(dir / (stem + ".csv"));
        }
    }
    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace fieldsim::cli
