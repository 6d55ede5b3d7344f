#include "ia/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ia/errors.hpp"
#include "ia/rng.hpp"

namespace ia::channel {

ChannelFamily ChannelFamily::siso_generic_ext(int T) {
  ChannelFamily f;
  f.kind = FamilyKind::SisoGenericExt;
  f.T = T;
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::siso_l_tap(int N, std::vector<int> delays) {
  ChannelFamily f;
  f.kind = FamilyKind::SisoLTap;
  f.T = N;
  f.delays = std::move(delays);
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::siso_block_fading(std::vector<int> lengths) {
  ChannelFamily f;
  f.kind = FamilyKind::SisoBlockFading;
  f.block_lengths = std::move(lengths);
  f.T = std::accumulate(f.block_lengths.begin(), f.block_lengths.end(), 0);
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::mimo_constant(int Mt, int Mr) {
  ChannelFamily f;
  f.kind = FamilyKind::MimoConstant;
  f.Mt = Mt;
  f.Mr = Mr;
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::mimo_constant_ext(int Mt, int Mr, int T) {
  ChannelFamily f;
  f.kind = FamilyKind::MimoConstantExt;
  f.Mt = Mt;
  f.Mr = Mr;
  f.T = T;
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::mimo_generic_ext(int Mt, int Mr, int T) {
  ChannelFamily f;
  f.kind = FamilyKind::MimoGenericExt;
  f.Mt = Mt;
  f.Mr = Mr;
  f.T = T;
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::acs_constant(int T) {
  ChannelFamily f;
  f.kind = FamilyKind::AcsConstant;
  f.T = T;
  f.validate();
  return f;
}

ChannelFamily ChannelFamily::custom(std::vector<lin::Matrix> blocks) {
  ChannelFamily f;
  f.kind = FamilyKind::Custom;
  f.custom_blocks = std::move(blocks);
  f.validate();
  return f;
}

int ChannelFamily::nt() const {
  switch (kind) {
    case FamilyKind::MimoConstant:
    case FamilyKind::MimoConstantExt:
    case FamilyKind::MimoGenericExt:
      return Mt * T;
    case FamilyKind::AcsConstant:
      return 2 * T;
    case FamilyKind::Custom:
      return custom_blocks.empty() ? 0 : custom_blocks.front().cols();
    default:
      return T;
  }
}

int ChannelFamily::nr() const {
  switch (kind) {
    case FamilyKind::MimoConstant:
    case FamilyKind::MimoConstantExt:
    case FamilyKind::MimoGenericExt:
      return Mr * T;
    case FamilyKind::AcsConstant:
      return 2 * T;
    case FamilyKind::Custom:
      return custom_blocks.empty() ? 0 : custom_blocks.front().rows();
    default:
      return T;
  }
}

int ChannelFamily::L() const {
  switch (kind) {
    case FamilyKind::SisoGenericExt:
      return T;
    case FamilyKind::SisoLTap:
      return static_cast<int>(delays.size());
    case FamilyKind::SisoBlockFading:
      return static_cast<int>(block_lengths.size());
    case FamilyKind::MimoConstant:
    case FamilyKind::MimoConstantExt:
      return Mt * Mr;
    case FamilyKind::MimoGenericExt:
      return Mt * Mr * T;
    case FamilyKind::AcsConstant:
      return 2;
    case FamilyKind::Custom:
      return static_cast<int>(custom_blocks.size());
  }
  return 0;
}

bool ChannelFamily::is_siso_diagonal() const {
  return kind == FamilyKind::SisoGenericExt || kind == FamilyKind::SisoLTap ||
         kind == FamilyKind::SisoBlockFading;
}

void ChannelFamily::validate() const {
  switch (kind) {
    case FamilyKind::SisoGenericExt:
      if (T < 1) throw InvalidFamilyParams("siso_generic_ext: T must be >= 1");
      break;
    case FamilyKind::SisoLTap: {
      if (T < 1) throw InvalidFamilyParams("siso_l_tap: N must be >= 1");
      if (delays.empty()) throw InvalidFamilyParams("siso_l_tap: delays must be nonempty");
      for (size_t i = 0; i < delays.size(); ++i) {
        if (delays[i] < 0 || delays[i] > T - 1)
          throw InvalidFamilyParams("siso_l_tap: delays must lie in [0, N-1]");
        if (i > 0 && delays[i] <= delays[i - 1])
          throw InvalidFamilyParams("siso_l_tap: delays must be strictly increasing");
      }
      break;
    }
    case FamilyKind::SisoBlockFading:
      if (block_lengths.empty())
        throw InvalidFamilyParams("siso_block_fading: block lengths must be nonempty");
      for (int len : block_lengths)
        if (len < 1) throw InvalidFamilyParams("siso_block_fading: block lengths must be >= 1");
      break;
    case FamilyKind::MimoConstant:
      if (Mt < 1 || Mr < 1) throw InvalidFamilyParams("mimo_constant: Mt, Mr must be >= 1");
      if (T != 1) throw InvalidFamilyParams("mimo_constant: T is fixed at 1");
      break;
    case FamilyKind::MimoConstantExt:
    case FamilyKind::MimoGenericExt:
      if (Mt < 1 || Mr < 1) throw InvalidFamilyParams("mimo extension: Mt, Mr must be >= 1");
      if (T < 1) throw InvalidFamilyParams("mimo extension: T must be >= 1");
      break;
    case FamilyKind::AcsConstant:
      if (T < 1) throw InvalidFamilyParams("acs_constant: T must be >= 1");
      break;
    case FamilyKind::Custom: {
      if (custom_blocks.empty()) throw InvalidFamilyParams("custom: blocks must be nonempty");
      int r = custom_blocks.front().rows();
      int c = custom_blocks.front().cols();
      if (r < 1 || c < 1) throw InvalidFamilyParams("custom: blocks must be nonempty matrices");
      for (const lin::Matrix& b : custom_blocks)
        if (b.rows() != r || b.cols() != c)
          throw InvalidFamilyParams("custom: all blocks must share one shape");
      break;
    }
  }
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::SisoGenericExt:
      return "siso_generic_ext";
    case FamilyKind::SisoLTap:
      return "siso_l_tap";
    case FamilyKind::SisoBlockFading:
      return "siso_block_fading";
    case FamilyKind::MimoConstant:
      return "mimo_constant";
    case FamilyKind::MimoConstantExt:
      return "mimo_constant_ext";
    case FamilyKind::MimoGenericExt:
      return "mimo_generic_ext";
    case FamilyKind::AcsConstant:
      return "acs_constant";
    case FamilyKind::Custom:
      return "custom";
  }
  return "unknown";
}

namespace {

// Elementary basis of Mr x Mt matrices in column-major order:
// index l corresponds to row l % Mr, column l / Mr.
lin::Matrix elementary(int Mr, int Mt, int l) {
  lin::Matrix e(Mr, Mt);
  e(l % Mr, l / Mr) = 1.0;
  return e;
}

}  // namespace

BuildingBlocks build_blocks(const ChannelFamily& family) {
  family.validate();
  BuildingBlocks out;
  out.family = family;

  switch (family.kind) {
    case FamilyKind::SisoGenericExt: {
      for (int t = 0; t < family.T; ++t) {
        lin::Matrix a(family.T, family.T);
        a(t, t) = 1.0;
        out.blocks.push_back(std::move(a));
      }
      break;
    }
    case FamilyKind::SisoLTap: {
      int N = family.T;
      for (int lambda : family.delays) {
        lin::Matrix a(N, N);
        for (int n = 0; n < N; ++n) {
          // Tone n of a delay-lambda tap: exp(2*pi*i*n*lambda/N).
          double ang = 2.0 * std::numbers::pi * static_cast<double>(n) *
                       static_cast<double>(lambda) / static_cast<double>(N);
          a(n, n) = std::polar(1.0, ang);
        }
        out.blocks.push_back(std::move(a));
      }
      break;
    }
    case FamilyKind::SisoBlockFading: {
      int T = family.T;
      int start = 0;
      for (int len : family.block_lengths) {
        lin::Matrix a(T, T);
        for (int t = start; t < start + len; ++t) a(t, t) = 1.0;
        start += len;
        out.blocks.push_back(std::move(a));
      }
      break;
    }
    case FamilyKind::MimoConstant: {
      for (int l = 0; l < family.Mt * family.Mr; ++l)
        out.blocks.push_back(elementary(family.Mr, family.Mt, l));
      break;
    }
    case FamilyKind::MimoConstantExt: {
      int Mr = family.Mr, Mt = family.Mt, T = family.T;
      for (int l = 0; l < Mt * Mr; ++l) {
        lin::Matrix a(Mr * T, Mt * T);
        int p = l % Mr, q = l / Mr;
        for (int t = 0; t < T; ++t) a(t * Mr + p, t * Mt + q) = 1.0;
        out.blocks.push_back(std::move(a));
      }
      break;
    }
    case FamilyKind::MimoGenericExt: {
      int Mr = family.Mr, Mt = family.Mt, T = family.T;
      for (int t = 0; t < T; ++t) {
        for (int l = 0; l < Mt * Mr; ++l) {
          lin::Matrix a(Mr * T, Mt * T);
          a(t * Mr + l % Mr, t * Mt + l / Mr) = 1.0;
          out.blocks.push_back(std::move(a));
        }
      }
      break;
    }
    case FamilyKind::AcsConstant: {
      int n = 2 * family.T;
      out.blocks.push_back(lin::Matrix::identity(n));
      lin::Matrix j(n, n);
      for (int t = 0; t < family.T; ++t) {
        j(2 * t, 2 * t + 1) = -1.0;
        j(2 * t + 1, 2 * t) = 1.0;
      }
      out.blocks.push_back(std::move(j));
      break;
    }
    case FamilyKind::Custom: {
      out.blocks = family.custom_blocks;
      if (diversity_order(out) != out.count())
        throw DegenerateBlocks("custom: blocks are linearly dependent");
      break;
    }
  }
  return out;
}

ChannelInstance sample_instance(const BuildingBlocks& blocks, int K, std::uint64_t seed) {
  if (K < 1) throw DimensionMismatch("sample_instance: K must be >= 1");
  ChannelInstance inst;
  inst.blocks = blocks;
  inst.K = K;
  inst.seed = seed;
  inst.tau.assign(K, std::vector<std::vector<lin::cplx>>(K));
  inst.H.assign(K, std::vector<lin::Matrix>(K));

  Rng rng(seed);
  bool real = blocks.family.real_taus();
  int L = blocks.count();
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      std::vector<lin::cplx>& t = inst.tau[k][j];
      t.resize(L);
      for (int l = 0; l < L; ++l)
        t[l] = real ? lin::cplx(rng.gaussian(), 0.0) : rng.cgaussian();
      inst.H[k][j] = assemble(blocks, t);
    }
  }
  return inst;
}

lin::Matrix assemble(const BuildingBlocks& blocks, const std::vector<lin::cplx>& tau) {
  if (tau.size() != static_cast<size_t>(blocks.count()))
    throw DimensionMismatch("assemble: coefficient count != block count");
  lin::Matrix h(blocks.nr(), blocks.nt());
  for (int l = 0; l < blocks.count(); ++l) lin::add_scaled(h, blocks.blocks[l], tau[l]);
  return h;
}

int diversity_order(const BuildingBlocks& blocks, double rel_tol) {
  int nr = blocks.nr(), nt = blocks.nt();
  lin::Matrix stacked(blocks.count(), nr * nt);
  for (int l = 0; l < blocks.count(); ++l) {
    const lin::Matrix& a = blocks.blocks[l];
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nr; ++i) stacked(l, j * nr + i) = a(i, j);
  }
  return lin::numerical_rank(stacked, rel_tol);
}

bool has_full_rank_combination(const BuildingBlocks& blocks, int trials, std::uint64_t seed,
                               double rel_tol) {
  int want = std::min(blocks.nr(), blocks.nt());
  Rng rng(seed);
  bool real = blocks.family.real_taus();
  std::vector<lin::cplx> coeff(blocks.count());
  for (int t = 0; t < trials; ++t) {
    for (lin::cplx& c : coeff) c = real ? lin::cplx(rng.gaussian(), 0.0) : rng.cgaussian();
    if (lin::numerical_rank(assemble(blocks, coeff), rel_tol) == want) return true;
  }
  return false;
}

}  // namespace ia::channel
