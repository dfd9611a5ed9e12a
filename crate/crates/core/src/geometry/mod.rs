//! Mask patterns, the tilted-mask gap law, and refractive-index maps of the
//! tapered guide and the fiber.

mod exposure;
mod index;
mod mask;

pub use exposure::ExposureSetup;
pub use index::{
    fiber_index_map, fiber_index_map_centered, frustum_index_map, frustum_index_map_with,
    uniform_index_map, FrustumGeometry, FrustumProvider, IndexMap, IndexProvider, IndexSampling,
    StaticIndex, BENCHMARK_INDICES, LITHO_INDICES,
};
pub use mask::{trapezoid_mask, MaskPattern};
