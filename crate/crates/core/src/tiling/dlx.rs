//! Knuth's Algorithm X over a dancing-links sparse matrix.
//!
//! Items are the columns to be covered exactly once; options are the rows.
//! The search always branches on the item with the fewest remaining
//! options, breaking ties by the lowest item index. Within an item,
//! options are tried in insertion order.

const ROOT: usize = 0;

#[derive(Debug, Clone)]
pub struct ExactCover {
    items: usize,
    options: usize,
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    /// Header node of each node's item.
    item_of: Vec<usize>,
    /// Option index of each node (headers hold `usize::MAX`).
    option_of: Vec<usize>,
    size: Vec<usize>,
}

impl ExactCover {
    pub fn new(items: usize) -> Self {
        let n = items + 1;
        let mut left: Vec<usize> = (0..n).map(|i| if i == 0 { items } else { i - 1 }).collect();
        let mut right: Vec<usize> = (0..n).map(|i| if i == items { 0 } else { i + 1 }).collect();
        if items == 0 {
            left[0] = 0;
            right[0] = 0;
        }
        ExactCover {
            items,
            options: 0,
            left,
            right,
            up: (0..n).collect(),
            down: (0..n).collect(),
            item_of: (0..n).collect(),
            option_of: vec![usize::MAX; n],
            size: vec![0; n],
        }
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn options(&self) -> usize {
        self.options
    }

    /// Appends an option covering `cells` (item indices, no repeats) and
    /// returns its index.
    pub fn add_option(&mut self, cells: &[usize]) -> usize {
        let id = self.options;
        self.options += 1;
        let mut first: Option<usize> = None;
        for &cell in cells {
            assert!(cell < self.items, "item {cell} out of range");
            let header = cell + 1;
            let node = self.left.len();
            let bottom = self.up[header];
            self.up.push(bottom);
            self.down.push(header);
            self.down[bottom] = node;
            self.up[header] = node;
            self.item_of.push(header);
            self.option_of.push(id);
            self.size[header] += 1;
            match first {
                None => {
                    self.left.push(node);
                    self.right.push(node);
                    first = Some(node);
                }
                Some(f) => {
                    let last = self.left[f];
                    self.left.push(last);
                    self.right.push(f);
                    self.right[last] = node;
                    self.left[f] = node;
                }
            }
        }
        id
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.item_of[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.size[self.item_of[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    fn choose_item(&self) -> usize {
        let mut best = self.right[ROOT];
        let mut j = self.right[best];
        while j != ROOT {
            if self.size[j] < self.size[best] {
                best = j;
            }
            j = self.right[j];
        }
        best
    }

    /// Visits every exact cover in search order. `visit` receives the chosen
    /// option indices and returns `false` to stop the search early.
    pub fn search<F: FnMut(&[usize]) -> bool>(&mut self, mut visit: F) {
        let mut partial = Vec::with_capacity(self.items);
        self.search_rec(&mut partial, &mut visit);
    }

    fn search_rec(&mut self, partial: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if self.right[ROOT] == ROOT {
            return visit(partial);
        }
        let c = self.choose_item();
        if self.size[c] == 0 {
            return true;
        }
        self.cover(c);
        let mut r = self.down[c];
        let mut keep_going = true;
        while r != c {
            partial.push(self.option_of[r]);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.item_of[j]);
                j = self.right[j];
            }
            keep_going = self.search_rec(partial, visit);
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.item_of[j]);
                j = self.left[j];
            }
            partial.pop();
            if !keep_going {
                break;
            }
            r = self.down[r];
        }
        self.uncover(c);
        keep_going
    }

    /// Collects up to `cap` solutions.
    pub fn solutions(&mut self, cap: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if cap == 0 {
            return out;
        }
        self.search(|s| {
            out.push(s.to_vec());
            out.len() < cap
        });
        out
    }

    pub fn count(&mut self) -> u64 {
        let mut n = 0u64;
        self.search(|_| {
            n += 1;
            true
        });
        n
    }
}
