#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "echoq/error.hpp"

namespace echoq {

/// Row-major 2-D raster. Row index runs along depth, column index along width.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{}) : width_(width), height_(height)
    {
        if (width < 0 || height < 0) throw InputError("negative grid dimensions");
        values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    Grid(int width, int height, std::vector<T> values)
        : width_(width), height_(height), values_(std::move(values))
    {
        if (width < 0 || height < 0 ||
            values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw InputError("grid value count does not match dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    bool contains(int row, int col) const noexcept
    {
        return row >= 0 && col >= 0 && row < height_ && col < width_;
    }
    std::size_t index(int row, int col) const noexcept
    {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    T& operator()(int row, int col) noexcept { return values_[index(row, col)]; }
    const T& operator()(int row, int col) const noexcept { return values_[index(row, col)]; }
    T& operator[](std::size_t i) noexcept { return values_[i]; }
    const T& operator[](std::size_t i) const noexcept { return values_[i]; }

    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }
    const std::vector<T>& storage() const noexcept { return values_; }

    bool same_shape(int width, int height) const noexcept
    {
        return width_ == width && height_ == height;
    }
    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    bool operator==(const Grid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> values_;
};

/// Binary region raster; nonzero means "in region".
using Mask = Grid<std::uint8_t>;

inline std::size_t count(const Mask& mask)
{
    std::size_t n = 0;
    for (auto v : mask.values()) n += v != 0;
    return n;
}

inline Mask mask_and(const Mask& a, const Mask& b)
{
    if (!a.same_shape(b)) throw ValidationError("mask dimensions differ");
    Mask out(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
    return out;
}

/// Left-right mirror: column c maps to width-1-c.
template <typename T>
Grid<T> mirror_horizontal(const Grid<T>& grid)
{
    Grid<T> out(grid.width(), grid.height());
    for (int r = 0; r < grid.height(); ++r)
        for (int c = 0; c < grid.width(); ++c) out(r, grid.width() - 1 - c) = grid(r, c);
    return out;
}

} // namespace echoq
