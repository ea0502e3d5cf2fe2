#include "expfiber/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>

namespace expfiber {

Window Window::with_width(cplx center, double width, int pixels_x, int pixels_y)
{
    return Window{center, width, width * pixels_y / pixels_x, pixels_x, pixels_y};
}

void Window::validate() const
{
    if (pixels_x < 1 || pixels_y < 1 || !(width > 0) || !(height > 0))
        throw Error(ErrorCode::Precondition, "window needs positive extents and pixel counts");
    const double grid = static_cast<double>(pixels_x) / pixels_y;
    if (std::abs(width / height - grid) > 1e-6 * grid)
        throw Error(ErrorCode::Precondition, "window aspect ratio does not match its pixel grid");
}

cplx Window::pixel(int i, int j) const
{
    // Offsets are antisymmetric about the centre so mirrored windows hit
    // mirrored points exactly.
    const double dx = width / pixels_x, dy = height / pixels_y;
    return {center.real() + (i - (pixels_x - 1) / 2.0) * dx,
            center.imag() + ((pixels_y - 1) / 2.0 - j) * dy};
}

std::vector<int> escape_times(const RenderJob& job)
{
    const Window& w = job.window;
    w.validate();
    if (job.max_iter < 1)
        throw Error(ErrorCode::Precondition, "max_iter must be at least 1");
    if (!(job.escape_real > w.center.real() + w.width / 2))
        throw Error(ErrorCode::Precondition, "escape threshold must exceed the window's right edge");

    std::vector<int> out(static_cast<std::size_t>(w.pixels_x) * w.pixels_y, -1);
    for (int j = 0; j < w.pixels_y; ++j)
        for (int i = 0; i < w.pixels_x; ++i) {
            const cplx p = w.pixel(i, j);
            const cplx c = job.mode == RenderMode::Parameter ? p : job.c;
            cplx z = p;
            for (int n = 0; n <= job.max_iter; ++n) {
                if (z.real() > job.escape_real) {
                    out[static_cast<std::size_t>(j) * w.pixels_x + i] = n;
                    break;
                }
                z = std::exp(z) + c;
            }
        }
    return out;
}

unsigned char shade(int escape_time)
{
    if (escape_time < 0)
        return 0;
    return static_cast<unsigned char>(std::lround(40 + 215 * std::pow(0.9, escape_time)));
}

namespace {

// Strokes a polyline of width about one pixel, keeping the strongest
// coverage per pixel so overlapping samples do not darken.
void stroke(std::vector<float>& coverage, const Window& w, const std::vector<cplx>& line)
{
    const double sx = w.pixels_x / w.width, sy = w.pixels_y / w.height;
    auto to_pixel = [&](cplx z) {
        return std::pair<double, double>{(z.real() - (w.center.real() - w.width / 2)) * sx - 0.5,
                                         ((w.center.imag() + w.height / 2) - z.imag()) * sy - 0.5};
    };
    auto splat = [&](double x, double y) {
        for (int j = static_cast<int>(std::floor(y)) - 1; j <= static_cast<int>(std::ceil(y)) + 1; ++j)
            for (int i = static_cast<int>(std::floor(x)) - 1; i <= static_cast<int>(std::ceil(x)) + 1;
                 ++i) {
                if (i < 0 || j < 0 || i >= w.pixels_x || j >= w.pixels_y)
                    continue;
                const double d = std::hypot(i - x, j - y);
                const float a = static_cast<float>(std::clamp(1.25 - d, 0.0, 1.0));
                float& c = coverage[static_cast<std::size_t>(j) * w.pixels_x + i];
                c = std::max(c, a);
            }
    };
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
        auto [x0, y0] = to_pixel(line[k]);
        auto [x1, y1] = to_pixel(line[k + 1]);
        // Clip the parameter range to the window grown by a two pixel border.
        double u0 = 0, u1 = 1;
        const double lo[2] = {-2.0, -2.0}, hi[2] = {w.pixels_x + 2.0, w.pixels_y + 2.0};
        const double p0[2] = {x0, y0}, d[2] = {x1 - x0, y1 - y0};
        for (int a = 0; a < 2 && u0 <= u1; ++a) {
            if (d[a] == 0) {
                if (p0[a] < lo[a] || p0[a] > hi[a])
                    u1 = -1;
                continue;
            }
            double ua = (lo[a] - p0[a]) / d[a], ub = (hi[a] - p0[a]) / d[a];
            if (ua > ub)
                std::swap(ua, ub);
            u0 = std::max(u0, ua);
            u1 = std::min(u1, ub);
        }
        if (u0 > u1)
            continue;
        const double len = std::hypot(d[0], d[1]) * (u1 - u0);
        const int steps = std::max(1, static_cast<int>(std::ceil(len * 4)));
        for (int s = 0; s <= steps; ++s) {
            const double u = u0 + (u1 - u0) * s / steps;
            splat(x0 + u * (x1 - x0), y0 + u * (y1 - y0));
        }
    }
}

bool inside(const Window& w, cplx z)
{
    return std::abs(z.real() - w.center.real()) <= w.width / 2 &&
           std::abs(z.imag() - w.center.imag()) <= w.height / 2;
}

} // namespace

RenderResult rasterize(const RenderJob& job)
{
    const std::vector<int> times = escape_times(job);
    RenderResult out;
    out.width = job.window.pixels_x;
    out.height = job.window.pixels_y;
    out.pixels.resize(times.size());
    std::transform(times.begin(), times.end(), out.pixels.begin(), shade);

    std::vector<float> coverage(times.size(), 0.0f);
    for (std::size_t k = 0; k < job.overlays.size(); ++k) {
        const RayTrace& t = job.overlays[k];
        std::vector<cplx> line;
        bool clipped = false;
        for (const auto& s : t.samples) {
            line.push_back(s.z);
            clipped = clipped || !inside(job.window, s.z);
        }
        if (clipped)
            out.warnings.push_back("OverlayOutOfWindow: ray " + t.address.str() +
                                   " leaves the window and is clipped");
        stroke(coverage, job.window, line);
    }
    // Rays are drawn in a mid grey that stays visible on both the escaping
    // (light) and non-escaping (black) parts.
    const float ink = 150.0f;
    for (std::size_t p = 0; p < out.pixels.size(); ++p) {
        const float a = coverage[p];
        if (a > 0) {
            const float base = out.pixels[p];
            const float ray = base > 100 ? 0.0f : ink;
            out.pixels[p] = static_cast<unsigned char>(std::lround(base * (1 - a) + ray * a));
        }
    }
    return out;
}

void write_png(const std::string& path, const RenderResult& image)
{
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!file)
        throw Error(ErrorCode::IOFailure, "cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::IOFailure, "libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IOFailure, "libpng failed writing " + path);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int j = 0; j < image.height; ++j)
        png_write_row(png, const_cast<png_bytep>(image.pixels.data()) +
                               static_cast<std::size_t>(j) * image.width);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

RenderResult render(const RenderJob& job)
{
    RenderResult image = rasterize(job);
    write_png(job.output, image);
    std::ofstream side(job.output + ".txt");
    if (!side)
        throw Error(ErrorCode::IOFailure, "cannot write " + job.output + ".txt");
    side << std::setprecision(17);
    side << "mode=" << (job.mode == RenderMode::Parameter ? "parameter" : "dynamical") << '\n';
    if (job.mode == RenderMode::Dynamical)
        side << "c=" << format_complex(job.c) << '\n';
    side << "center=" << format_complex(job.window.center) << '\n';
    side << "width=" << job.window.width << '\n';
    side << "height=" << job.window.height << '\n';
    side << "pixels_x=" << job.window.pixels_x << '\n';
    side << "pixels_y=" << job.window.pixels_y << '\n';
    side << "max_iter=" << job.max_iter << '\n';
    side << "escape_real=" << job.escape_real << '\n';
    for (const auto& p : job.overlay_paths)
        side << "overlay=" << p << '\n';
    for (const auto& w : image.warnings)
        side << "warning=" << w << '\n';
    return image;
}

} // namespace expfiber
