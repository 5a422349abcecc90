//! Name-keyed collections of interchangeable strategies.

use crate::error::{Error, Result};

/// Ordered registry of boxed strategy objects, looked up by name at runtime.
pub struct Registry<T: ?Sized> {
    entries: Vec<(&'static str, Box<T>)>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `item` under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &'static str, item: Box<T>) -> &mut Self {
        if let Some(slot) = self.entries.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = item;
        } else {
            self.entries.push((name, item));
        }
        self
    }

    pub fn with(mut self, name: &'static str, item: Box<T>) -> Self {
        self.register(name, item);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, item)| item.as_ref())
            .ok_or_else(|| Error::UnknownStrategy { name: name.to_string(), available: self.names().join(", ") })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &T)> {
        self.entries.iter().map(|(n, item)| (*n, item.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Shape {
        fn area(&self) -> f64;
    }
    struct Square(f64);
    impl Shape for Square {
        fn area(&self) -> f64 {
            self.0 * self.0
        }
    }

    #[test]
    fn lookup_and_replace() {
        let mut reg: Registry<dyn Shape> = Registry::new();
        reg.register("square", Box::new(Square(2.0)));
        assert_eq!(reg.get("SQUARE").unwrap().area(), 4.0);
        reg.register("square", Box::new(Square(3.0)));
        assert_eq!(reg.len(), 1);
        assert_eq!(reg.get("square").unwrap().area(), 9.0);
        match reg.get("circle") {
            Err(Error::UnknownStrategy { available, .. }) => assert_eq!(available, "square"),
            _ => panic!("expected unknown strategy"),
        }
    }
}
