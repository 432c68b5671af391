#include <X11/Xatom.h>
#include <X11/Xlib.h>
#include <X11/Xutil.h>
#include <X11/keysym.h>

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "pforge/display.hpp"

namespace pforge {

namespace {

int mask_shift(unsigned long mask) { return mask == 0 ? 0 : std::countr_zero(mask); }

class X11WindowSink final : public FrameSink {
 public:
  X11WindowSink(int width, int height, bool fullscreen, const std::string& title) {
    dpy_ = XOpenDisplay(nullptr);
    if (dpy_ == nullptr) throw std::runtime_error("cannot open X display (is DISPLAY set?)");
    const int screen = DefaultScreen(dpy_);
    Visual* visual = DefaultVisual(dpy_, screen);
    depth_ = DefaultDepth(dpy_, screen);
    if (visual->c_class != TrueColor || depth_ < 24) {
      XCloseDisplay(dpy_);
      throw std::runtime_error("X display needs a 24-bit TrueColor visual");
    }
    visual_ = visual;
    r_shift_ = mask_shift(visual->red_mask);
    g_shift_ = mask_shift(visual->green_mask);
    b_shift_ = mask_shift(visual->blue_mask);

    if (fullscreen) {
      width = DisplayWidth(dpy_, screen);
      height = DisplayHeight(dpy_, screen);
    }
    win_w_ = width;
    win_h_ = height;
    win_ = XCreateSimpleWindow(dpy_, RootWindow(dpy_, screen), 0, 0,
                               static_cast<unsigned>(width), static_cast<unsigned>(height), 0,
                               BlackPixel(dpy_, screen), BlackPixel(dpy_, screen));
    XStoreName(dpy_, win_, title.c_str());
    XSelectInput(dpy_, win_, KeyPressMask | StructureNotifyMask | ExposureMask);
    wm_delete_ = XInternAtom(dpy_, "WM_DELETE_WINDOW", False);
    XSetWMProtocols(dpy_, win_, &wm_delete_, 1);
    if (fullscreen) {
      Atom state = XInternAtom(dpy_, "_NET_WM_STATE", False);
      Atom full = XInternAtom(dpy_, "_NET_WM_STATE_FULLSCREEN", False);
      XChangeProperty(dpy_, win_, state, XA_ATOM, 32, PropModeReplace,
                      reinterpret_cast<unsigned char*>(&full), 1);
    }
    gc_ = XCreateGC(dpy_, win_, 0, nullptr);
    XMapRaised(dpy_, win_);
    XFlush(dpy_);
  }

  ~X11WindowSink() override {
    release_image();
    if (gc_ != nullptr) XFreeGC(dpy_, gc_);
    XDestroyWindow(dpy_, win_);
    XCloseDisplay(dpy_);
  }

  X11WindowSink(const X11WindowSink&) = delete;
  X11WindowSink& operator=(const X11WindowSink&) = delete;

  void present(const AnaglyphFrame& frame, std::uint64_t) override {
    pump_events();
    if (close_requested_) return;
    if (image_ == nullptr || frame.width() != src_w_ || frame.height() != src_h_ ||
        image_->width != win_w_ || image_->height != win_h_) {
      rebuild(frame.width(), frame.height());
    }
    auto* out = reinterpret_cast<std::uint32_t*>(image_->data);
    const int stride = image_->bytes_per_line / 4;
    for (int y = 0; y < win_h_; ++y) {
      std::uint32_t* row = out + static_cast<std::ptrdiff_t>(y) * stride;
      const int sy = ymap_[static_cast<std::size_t>(y)];
      for (int x = 0; x < win_w_; ++x) {
        const int sx = xmap_[static_cast<std::size_t>(x)];
        if (sx < 0 || sy < 0) {
          row[x] = 0;
          continue;
        }
        const std::uint8_t* p = frame.at(sx, sy);
        row[x] = (std::uint32_t{p[0]} << r_shift_) | (std::uint32_t{p[1]} << g_shift_) |
                 (std::uint32_t{p[2]} << b_shift_);
      }
    }
    XPutImage(dpy_, win_, gc_, image_, 0, 0, 0, 0, static_cast<unsigned>(win_w_),
              static_cast<unsigned>(win_h_));
    XFlush(dpy_);
  }

  bool wants_close() override {
    pump_events();
    return close_requested_;
  }

 private:
  void pump_events() {
    while (XPending(dpy_) > 0) {
      XEvent ev;
      XNextEvent(dpy_, &ev);
      switch (ev.type) {
        case ConfigureNotify:
          win_w_ = std::max(1, ev.xconfigure.width);
          win_h_ = std::max(1, ev.xconfigure.height);
          break;
        case ClientMessage:
          if (static_cast<Atom>(ev.xclient.data.l[0]) == wm_delete_) close_requested_ = true;
          break;
        case KeyPress: {
          const KeySym key = XLookupKeysym(&ev.xkey, 0);
          if (key == XK_Escape || key == XK_q) close_requested_ = true;
          break;
        }
        default:
          break;
      }
    }
  }

  void release_image() {
    if (image_ != nullptr) {
      image_->data = nullptr;  // storage belongs to pixels_
      XDestroyImage(image_);
      image_ = nullptr;
    }
  }

  // Letterboxed nearest-neighbour lookup tables; -1 marks the black border.
  void rebuild(int src_w, int src_h) {
    release_image();
    src_w_ = src_w;
    src_h_ = src_h;
    pixels_.assign(static_cast<std::size_t>(win_w_) * static_cast<std::size_t>(win_h_), 0);
    image_ = XCreateImage(dpy_, visual_, static_cast<unsigned>(depth_), ZPixmap, 0,
                          reinterpret_cast<char*>(pixels_.data()), static_cast<unsigned>(win_w_),
                          static_cast<unsigned>(win_h_), 32, win_w_ * 4);
    if (image_ == nullptr) throw std::runtime_error("XCreateImage failed");

    const double scale = std::min(static_cast<double>(win_w_) / src_w,
                                  static_cast<double>(win_h_) / src_h);
    const int draw_w = std::max(1, static_cast<int>(src_w * scale));
    const int draw_h = std::max(1, static_cast<int>(src_h * scale));
    const int off_x = (win_w_ - draw_w) / 2;
    const int off_y = (win_h_ - draw_h) / 2;
    xmap_.assign(static_cast<std::size_t>(win_w_), -1);
    ymap_.assign(static_cast<std::size_t>(win_h_), -1);
    for (int x = 0; x < draw_w; ++x) {
      xmap_[static_cast<std::size_t>(off_x + x)] = std::min(src_w - 1, static_cast<int>(x / scale));
    }
    for (int y = 0; y < draw_h; ++y) {
      ymap_[static_cast<std::size_t>(off_y + y)] = std::min(src_h - 1, static_cast<int>(y / scale));
    }
  }

  Display* dpy_ = nullptr;
  Visual* visual_ = nullptr;
  Window win_ = 0;
  GC gc_ = nullptr;
  Atom wm_delete_ = 0;
  XImage* image_ = nullptr;
  int depth_ = 24;
  int r_shift_ = 16, g_shift_ = 8, b_shift_ = 0;
  int win_w_ = 0, win_h_ = 0;
  int src_w_ = 0, src_h_ = 0;
  bool close_requested_ = false;
  std::vector<std::uint32_t> pixels_;
  std::vector<int> xmap_, ymap_;
};

}  // namespace

bool window_sink_available() noexcept { return std::getenv("DISPLAY") != nullptr; }

std::unique_ptr<FrameSink> make_window_sink(int width, int height, bool fullscreen,
                                            const std::string& title) {
  return std::make_unique<X11WindowSink>(width, height, fullscreen, title);
}

}  // namespace pforge
