// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace svdb {

template <typename T>
struct Vec3 {
    T x{}, y{}, z{};

    constexpr Vec3() = default;
    constexpr Vec3(T xx, T yy, T zz) : x(xx), y(yy), z(zz) {}
    constexpr explicit Vec3(T s) : x(s), y(s), z(s) {}

    template <typename U>
    constexpr explicit Vec3(const Vec3<U>& v) : x(T(v.x)), y(T(v.y)), z(T(v.z))
    {
    }

    constexpr T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr T operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(const Vec3& o) const { return {x * o.x, y * o.y, z * o.z}; }
    constexpr Vec3 operator*(T s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(T s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }

    Vec3& operator+=(const Vec3& o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator*=(const Vec3& o)
    {
        x *= o.x;
        y *= o.y;
        z *= o.z;
        return *this;
    }
    Vec3& operator/=(T s)
    {
        x /= s;
        y /= s;
        z /= s;
        return *this;
    }

    constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
    constexpr bool operator!=(const Vec3& o) const { return !(*this == o); }

    constexpr T max_component() const { return std::max(x, std::max(y, z)); }
    constexpr T min_component() const { return std::min(x, std::min(y, z)); }
};

using Vec3f = Vec3<float>;
using Vec3d = Vec3<double>;
using Vec3i = Vec3<int>;

/// Integer voxel coordinate.
using Coord = Vec3<int>;

template <typename T>
constexpr Vec3<T> operator*(T s, const Vec3<T>& v)
{
    return v * s;
}

template <typename T>
inline T dot(const Vec3<T>& a, const Vec3<T>& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
inline Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
inline T length(const Vec3<T>& v)
{
    return std::sqrt(dot(v, v));
}

template <typename T>
inline Vec3<T> normalize(const Vec3<T>& v)
{
    return v / length(v);
}

template <typename T>
constexpr Vec3<T> vmin(const Vec3<T>& a, const Vec3<T>& b)
{
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

template <typename T>
constexpr Vec3<T> vmax(const Vec3<T>& a, const Vec3<T>& b)
{
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

/// Half-open integer box [lo, hi).
struct Box3i {
    Coord lo;
    Coord hi;

    constexpr bool empty() const { return lo.x >= hi.x || lo.y >= hi.y || lo.z >= hi.z; }

    constexpr std::int64_t volume() const
    {
        if (empty())
            return 0;
        return std::int64_t(hi.x - lo.x) * std::int64_t(hi.y - lo.y) * std::int64_t(hi.z - lo.z);
    }

    constexpr bool contains(const Coord& p) const
    {
        return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y && p.z >= lo.z && p.z < hi.z;
    }

    static constexpr Box3i intersect(const Box3i& a, const Box3i& b)
    {
        return {vmax(a.lo, b.lo), vmin(a.hi, b.hi)};
    }
};

/// Ordering used everywhere a deterministic node/entry order is required:
/// lexicographic on (z, y, x), i.e. z varies slowest and x fastest.
struct CoordZyxLess {
    constexpr bool operator()(const Coord& a, const Coord& b) const
    {
        if (a.z != b.z)
            return a.z < b.z;
        if (a.y != b.y)
            return a.y < b.y;
        return a.x < b.x;
    }
};

} // namespace svdb
