"""Key-policy attribute-based encryption with redefinable-policy key
delegation over hierarchical attribute vectors.

Keys carry monotone policies compiled to linear secret sharing over a
composite-order bilinear group; ciphertexts carry sets of attribute
vectors. Key holders can extend their policy's vectors one level deeper
(adding brand-new attributes) and delegate the redefined key without
any requirement that the new policy be more restrictive.
"""

from . import algebra, attrspace, bench, bilinear, lsss, scheme, store
from .attrspace import (
    EMPTY,
    AttributeMatrix,
    AttributeSet,
    AttributeVector,
    encode_attr,
    is_prefix,
    load_matrix,
    make_vector,
)
from .bilinear import CURVE, DEBUG, BilinearParams, GElement, GTElement, gen_params
from .lsss import (
    AccessStructure,
    ChildSpec,
    NotAuthorized,
    PolicyError,
    check_delegation,
    compile_policy,
    derive_child,
    parse_policy,
    reconstruction,
    satisfies,
)
from .scheme import (
    Ciphertext,
    MasterSecretKey,
    PublicKey,
    SecretKey,
    decrypt,
    delegate,
    encrypt,
    kem_decrypt,
    kem_encrypt,
    keygen,
    setup,
)

__version__ = "0.1.0"
