#include "bosegas/rng.hpp"

namespace bosegas {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : key_(mix64(seed))
{
    for (auto id : path)
    {
        key_ = mix64(key_ ^ mix64(id + 0x632be59bd9b4e019ULL));
    }
    seed_state();
}

RandomStream::RandomStream(std::uint64_t key, int) : key_(key)
{
    seed_state();
}

RandomStream RandomStream::child(std::uint64_t id) const
{
    return RandomStream(mix64(key_ ^ mix64(id + 0x632be59bd9b4e019ULL)), 0);
}

void RandomStream::seed_state()
{
    std::uint64_t x = key_;
    for (auto& word : s_)
    {
        x += 0x9e3779b97f4a7c15ULL;
        word = mix64(x);
    }
}

RandomStream::result_type RandomStream::operator()()
{
    std::uint64_t const result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t const t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::normal()
{
    return normal_(*this);
}

}  // namespace bosegas
