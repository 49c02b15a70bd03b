//! Min-priority queue over pixels with decrease-key.
//!
//! Each pixel is queued at most once, under the smallest key offered so
//! far. Keys pack `(distance bits, cluster, pixel)` into a `u128`, so the
//! pop order is the lexicographic order of that triple.

const ABSENT: u32 = u32::MAX;
const DONE: u32 = u32::MAX - 1;

pub(crate) struct Frontier {
    heap: Vec<u128>,
    pos: Vec<u32>,
}

#[inline]
pub(crate) fn pack(dist_bits: u64, cluster: u32, pixel: u32) -> u128 {
    (u128::from(dist_bits) << 64) | (u128::from(cluster) << 32) | u128::from(pixel)
}

#[inline]
pub(crate) fn unpack(key: u128) -> (u32, u32) {
    ((key >> 32) as u32, key as u32)
}

impl Frontier {
    pub(crate) fn new(pixels: usize) -> Self {
        Self { heap: Vec::with_capacity(pixels.min(1 << 16)), pos: vec![ABSENT; pixels] }
    }

    /// Queues the key's pixel, or lowers its key if this one is smaller.
    #[inline]
    pub(crate) fn offer(&mut self, key: u128) {
        let p = key as u32 as usize;
        let i = self.pos[p];
        if i == DONE {
            return;
        }
        if i == ABSENT {
            self.heap.push(key);
            let i = self.heap.len() - 1;
            self.pos[p] = i as u32;
            self.sift_up(i);
        } else if key < self.heap[i as usize] {
            self.heap[i as usize] = key;
            self.sift_up(i as usize);
        }
    }

    /// Removes the smallest key. A popped pixel is never queued again.
    #[inline]
    pub(crate) fn pop(&mut self) -> Option<u128> {
        let last = self.heap.pop()?;
        let top = if self.heap.is_empty() {
            last
        } else {
            let top = std::mem::replace(&mut self.heap[0], last);
            self.pos[last as u32 as usize] = 0;
            self.sift_down(0);
            top
        };
        self.pos[top as u32 as usize] = DONE;
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize) {
        let key = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pk = self.heap[parent];
            if pk <= key {
                break;
            }
            self.heap[i] = pk;
            self.pos[pk as u32 as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = key;
        self.pos[key as u32 as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize) {
        let key = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && self.heap[r] < self.heap[l] { r } else { l };
            let ck = self.heap[c];
            if key <= ck {
                break;
            }
            self.heap[i] = ck;
            self.pos[ck as u32 as usize] = i as u32;
            i = c;
        }
        self.heap[i] = key;
        self.pos[key as u32 as usize] = i as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // Matches a lazy BinaryHeap that skips already-popped pixels.
        #[test]
        fn pops_in_key_order(ops in proptest::collection::vec((0u64..50, 0u32..4, 0u32..20, any::<bool>()), 1..200)) {
            let mut f = Frontier::new(20);
            let mut lazy = std::collections::BinaryHeap::new();
            let mut done = [false; 20];
            let mut got = Vec::new();
            let mut want = Vec::new();
            for (d, c, p, pop) in ops {
                if !done[p as usize] {
                    f.offer(pack(d, c, p));
                    lazy.push(std::cmp::Reverse(pack(d, c, p)));
                }
                if pop {
                    if let Some(k) = f.pop() {
                        done[unpack(k).1 as usize] = true;
                        got.push(k);
                    }
                    while let Some(std::cmp::Reverse(k)) = lazy.pop() {
                        let px = unpack(k).1 as usize;
                        if !want.iter().any(|&w: &u128| unpack(w).1 as usize == px) {
                            want.push(k);
                            break;
                        }
                    }
                }
            }
            prop_assert_eq!(got, want);
        }
    }
}
