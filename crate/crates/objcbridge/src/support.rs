//! `ObjCsupport.h`, the fixed C++ header every bridged class includes.

pub const SUPPORT_HEADER_NAME: &str = "ObjCsupport.h";

/// `objc_obj` reserves the pointer-sized `isa` slot so C++ member offsets
/// agree with the Objective-C instance layout. Its constructor is empty so
/// that constructing the C++ part in place leaves `isa` intact.
///
/// `objc_t` wraps the `va_list` of a variadic Objective-C method. Each `>>`
/// reads the next argument with the width it was passed at: `float` arrives
/// as `double`, `char` and `short` as `int`.
pub const SUPPORT_HEADER: &str = r#"#ifndef OBJCSUPPORT_H
#define OBJCSUPPORT_H

#include <stdarg.h>

typedef void *id;

class objc_obj {
public:
    void *isa;
    objc_obj() {}
};

class objc_t {
public:
    va_list *ap;
    objc_t() : ap(0) {}
};

inline objc_t &operator>>(objc_t &b, double &v) { v = va_arg(*b.ap, double); return b; }
inline objc_t &operator>>(objc_t &b, float &v) { v = (float) va_arg(*b.ap, double); return b; }
inline objc_t &operator>>(objc_t &b, long double &v) { v = va_arg(*b.ap, long double); return b; }
inline objc_t &operator>>(objc_t &b, int &v) { v = va_arg(*b.ap, int); return b; }
inline objc_t &operator>>(objc_t &b, unsigned &v) { v = va_arg(*b.ap, unsigned); return b; }
inline objc_t &operator>>(objc_t &b, long &v) { v = va_arg(*b.ap, long); return b; }
inline objc_t &operator>>(objc_t &b, unsigned long &v) { v = va_arg(*b.ap, unsigned long); return b; }
inline objc_t &operator>>(objc_t &b, long long &v) { v = va_arg(*b.ap, long long); return b; }
inline objc_t &operator>>(objc_t &b, unsigned long long &v) { v = va_arg(*b.ap, unsigned long long); return b; }
inline objc_t &operator>>(objc_t &b, short &v) { v = (short) va_arg(*b.ap, int); return b; }
inline objc_t &operator>>(objc_t &b, unsigned short &v) { v = (unsigned short) va_arg(*b.ap, int); return b; }
inline objc_t &operator>>(objc_t &b, char &v) { v = (char) va_arg(*b.ap, int); return b; }
inline objc_t &operator>>(objc_t &b, signed char &v) { v = (signed char) va_arg(*b.ap, int); return b; }
inline objc_t &operator>>(objc_t &b, unsigned char &v) { v = (unsigned char) va_arg(*b.ap, int); return b; }
template <class T>
inline objc_t &operator>>(objc_t &b, T *&v) { v = va_arg(*b.ap, T *); return b; }

#endif
"#;
