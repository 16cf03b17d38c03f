use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Integer scalar the arithmetic primitives are generic over.
///
/// Implemented for every signed machine integer and for `BigInt`.
pub trait IntScalar: Integer + Signed + Clone + Debug + FromPrimitive + ToPrimitive {}

impl<T> IntScalar for T where T: Integer + Signed + Clone + Debug + FromPrimitive + ToPrimitive {}
