#pragma once

#include <string>
#include <vector>

#include "expfiber/rays.hpp"

namespace expfiber {

struct Window {
    cplx center;
    double width = 0.0;
    double height = 0.0;
    int pixels_x = 0;
    int pixels_y = 0;

    // Height follows from the pixel grid.
    static Window with_width(cplx center, double width, int pixels_x, int pixels_y);
    void validate() const;
    // Centre of pixel (i, j); row 0 is the top edge.
    cplx pixel(int i, int j) const;
};

enum class RenderMode { Dynamical, Parameter };

struct RenderJob {
    RenderMode mode = RenderMode::Parameter;
    cplx c;                     // Dynamical mode only
    Window window;
    int max_iter = 200;
    double escape_real = 50.0;  // a point has escaped once Re z exceeds this
    std::vector<RayTrace> overlays;
    std::vector<std::string> overlay_paths;   // recorded in the sidecar
    std::string output;
};

// First iterate with Re z > escape_real for every pixel, row-major; -1 if none.
std::vector<int> escape_times(const RenderJob& job);

// Grey level of an escape time; independent of max_iter.
unsigned char shade(int escape_time);

struct RenderResult {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> pixels;   // row-major grey
    std::vector<std::string> warnings;
};

RenderResult rasterize(const RenderJob& job);

// Writes job.output as PNG plus job.output + ".txt" describing the job.
RenderResult render(const RenderJob& job);

void write_png(const std::string& path, const RenderResult& image);

} // namespace expfiber
